#include "opcert/opspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opcert/errors.hpp"

namespace opcert {

// ---------------------------------------------------------------------------
// Ambient
// ---------------------------------------------------------------------------

CMat Ambient::zero() const { return diagonal() ? CMat(rows, 1) : CMat(rows, cols); }

CMat Ambient::multiply(const CMat& a, const CMat& b) const {
  if (!diagonal()) return a * b;
  if (a.rows() != b.rows() || a.cols() != 1 || b.cols() != 1) {
    throw InvalidInput("Ambient::multiply: diagonal operands differ in length");
  }
  CMat r(a.rows(), 1);
  for (std::size_t i = 0; i < a.rows(); ++i) r(i, 0) = a(i, 0) * b(i, 0);
  return r;
}

CMat Ambient::adjoint(const CMat& a) const {
  if (!diagonal()) return a.adjoint();
  CMat r(a.rows(), 1);
  for (std::size_t i = 0; i < a.rows(); ++i) r(i, 0) = std::conj(a(i, 0));
  return r;
}

CMat Ambient::triple(const CMat& a, const CMat& b, const CMat& c) const {
  if (!diagonal()) return a * (b.adjoint() * c);
  CMat r(a.rows(), 1);
  for (std::size_t i = 0; i < a.rows(); ++i) r(i, 0) = a(i, 0) * std::conj(b(i, 0)) * c(i, 0);
  return r;
}

double Ambient::norm(const CMat& a) const {
  if (!diagonal()) return spectral_norm(a);
  double s = 0.0;
  for (const auto& z : a.entries()) s = std::max(s, std::abs(z));
  return s;
}

CMat Ambient::dense(const CMat& a) const {
  if (!diagonal()) return a;
  return CMat::diagonal(a.entries());
}

CMat Ambient::identity(std::size_t n) const {
  if (!diagonal()) return CMat::identity(n);
  CMat r(n, 1);
  for (std::size_t i = 0; i < n; ++i) r(i, 0) = 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// AmplifiedElement
// ---------------------------------------------------------------------------

CVec AmplifiedElement::flatten() const {
  CVec out;
  for (const auto& cell : grid) out.insert(out.end(), cell.begin(), cell.end());
  return out;
}

// ---------------------------------------------------------------------------
// ConcreteOpSpace
// ---------------------------------------------------------------------------

ConcreteOpSpace ConcreteOpSpace::make(std::vector<CMat> basis, std::optional<CVec> unit) {
  if (basis.empty()) throw InvalidInput("make_space: basis must contain at least one matrix");
  const std::size_t p = basis.front().rows();
  const std::size_t q = basis.front().cols();
  if (p == 0 || q == 0) throw InvalidInput("make_space: basis matrices must be nonempty");
  bool all_diagonal = p == q && p > 1;
  for (const auto& b : basis) {
    if (b.rows() != p || b.cols() != q) throw InvalidInput("make_space: basis matrices differ in shape");
    all_diagonal = all_diagonal && b.is_diagonal();
  }
  if (all_diagonal) {
    std::vector<CVec> diags;
    diags.reserve(basis.size());
    for (const auto& b : basis) {
      CVec d(p);
      for (std::size_t i = 0; i < p; ++i) d[i] = b(i, i);
      diags.push_back(std::move(d));
    }
    return make_diagonal(p, std::move(diags), std::move(unit));
  }
  ConcreteOpSpace s;
  s.ambient_ = Ambient{Layout::Dense, p, q};
  s.basis_ = std::move(basis);
  s.unit_ = std::move(unit);
  s.validate_and_prepare();
  return s;
}

ConcreteOpSpace ConcreteOpSpace::make_diagonal(std::size_t points, std::vector<CVec> diagonals,
                                               std::optional<CVec> unit) {
  if (diagonals.empty()) throw InvalidInput("make_space: basis must contain at least one function");
  if (points == 0) throw InvalidInput("make_space: sample set is empty");
  ConcreteOpSpace s;
  s.ambient_ = Ambient{Layout::Diagonal, points, points};
  for (auto& d : diagonals) {
    if (d.size() != points) throw InvalidInput("make_space: function basis lengths differ from point count");
    s.basis_.emplace_back(points, 1, std::move(d));
  }
  s.unit_ = std::move(unit);
  s.validate_and_prepare();
  return s;
}

void ConcreteOpSpace::validate_and_prepare() {
  const std::size_t d = basis_.size();
  CMat gram(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      gram(i, j) = frobenius_inner(basis_[i], basis_[j]);
      gram(j, i) = std::conj(gram(i, j));
    }
  const HermEigen eig = herm_eigen_decompose(gram);
  const double top = eig.values.back();
  if (!(eig.values.front() > 1e-10 * std::max(1.0, top))) {
    throw InvalidInput("make_space: basis is linearly dependent (Gram eigenvalue " +
                       std::to_string(eig.values.front()) + ")");
  }
  gram_inverse_ = CMat(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        gram_inverse_(i, j) += eig.vectors(i, k) * std::conj(eig.vectors(j, k)) / eig.values[k];
  if (unit_ && unit_->size() != d) throw InvalidInput("make_space: unit coefficient count differs from dimension");
}

const CVec& ConcreteOpSpace::require_unit() const {
  if (!unit_) throw PreconditionError("space has no designated unit u");
  return *unit_;
}

ConcreteOpSpace ConcreteOpSpace::with_unit(std::optional<CVec> unit) const {
  if (unit && unit->size() != dim()) throw InvalidInput("with_unit: coefficient count differs from dimension");
  ConcreteOpSpace s = *this;
  s.unit_ = std::move(unit);
  return s;
}

CMat ConcreteOpSpace::embed(std::span<const cplx> coeffs) const {
  if (coeffs.size() != dim()) throw InvalidInput("embed: coefficient count differs from dimension");
  CMat out = basis_.front();
  out *= coeffs[0];
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (coeffs[k] == cplx{}) continue;
    auto dst = out.entries();
    auto src = basis_[k].entries();
    for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += coeffs[k] * src[e];
  }
  return out;
}

CMat ConcreteOpSpace::embed_dense(std::span<const cplx> coeffs) const { return ambient_.dense(embed(coeffs)); }

double ConcreteOpSpace::norm(std::span<const cplx> coeffs) const { return ambient_.norm(embed(coeffs)); }

CMat ConcreteOpSpace::embed(const AmplifiedElement& x) const {
  const std::size_t n = x.level;
  if (x.grid.size() != n * n) throw InvalidInput("embed: amplified grid has the wrong cell count");
  const std::size_t p = rows();
  const std::size_t q = cols();
  CMat out(n * p, n * q);
  for (std::size_t bi = 0; bi < n; ++bi)
    for (std::size_t bj = 0; bj < n; ++bj) {
      const CMat cell = embed_dense(x.at(bi, bj));
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) out(bi * p + i, bj * q + j) = cell(i, j);
    }
  return out;
}

double ConcreteOpSpace::norm(const AmplifiedElement& x) const {
  const std::size_t n = x.level;
  if (x.grid.size() != n * n) throw InvalidInput("norm: amplified grid has the wrong cell count");
  if (!diagonal()) return spectral_norm(embed(x));
  // Diagonal cells: the block matrix is a direct sum of n x n scalar matrices, one per point.
  std::vector<CMat> cells;
  cells.reserve(n * n);
  for (const auto& c : x.grid) cells.push_back(embed(c));
  double best = 0.0;
  CMat small(n, n);
  for (std::size_t w = 0; w < rows(); ++w) {
    for (std::size_t k = 0; k < n * n; ++k) small.entries()[k] = cells[k](w, 0);
    best = std::max(best, spectral_norm(small));
  }
  return best;
}

AmplifiedElement ConcreteOpSpace::zero_amplified(std::size_t n) const {
  if (n == 0) throw InvalidInput("amplification level must be positive");
  AmplifiedElement x;
  x.level = n;
  x.grid.assign(n * n, CVec(dim()));
  return x;
}

AmplifiedElement ConcreteOpSpace::amplify_unit(std::size_t n) const {
  const CVec& u = require_unit();
  AmplifiedElement x = zero_amplified(n);
  for (std::size_t i = 0; i < n; ++i) x.at(i, i) = u;
  return x;
}

Membership ConcreteOpSpace::membership(const CMat& compact) const {
  const CMat& shape = basis_.front();
  if (compact.rows() != shape.rows() || compact.cols() != shape.cols()) {
    throw InvalidInput("membership: matrix does not have the ambient shape");
  }
  const std::size_t d = dim();
  CVec b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = frobenius_inner(basis_[i], compact);
  Membership out;
  out.coeffs.assign(d, cplx{});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out.coeffs[i] += gram_inverse_(i, j) * b[j];
  out.residual = frobenius_norm(compact - embed(out.coeffs));
  out.member = out.residual <= membership_tol_ * std::max(1.0, frobenius_norm(compact));
  return out;
}

Membership ConcreteOpSpace::membership_dense(const CMat& full) const {
  if (full.rows() != rows() || full.cols() != cols()) {
    throw InvalidInput("membership: matrix does not have the ambient shape");
  }
  if (!diagonal()) return membership(full);
  CMat diag(rows(), 1);
  double total = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) diag(i, 0) = full(i, i);
  for (const auto& z : full.entries()) total += std::norm(z);
  const double off = std::max(0.0, total - std::pow(frobenius_norm(diag), 2));
  Membership out = membership(diag);
  out.residual = std::sqrt(out.residual * out.residual + off);
  out.member = out.residual <= membership_tol_ * std::max(1.0, std::sqrt(total));
  return out;
}

CVec ConcreteOpSpace::coeffs_from_real(std::span<const double> params) {
  CVec out(params.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = cplx(params[2 * k], params[2 * k + 1]);
  return out;
}

RVec ConcreteOpSpace::real_from_coeffs(std::span<const cplx> coeffs) {
  RVec out(2 * coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    out[2 * k] = coeffs[k].real();
    out[2 * k + 1] = coeffs[k].imag();
  }
  return out;
}

}  // namespace opcert
