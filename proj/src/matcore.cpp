#include "opcert/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opcert/errors.hpp"

namespace opcert {

CMat::CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw InvalidInput("CMat: entry count does not match shape");
  }
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(std::span<const cplx> diag) {
  CMat m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMat CMat::unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
  CMat m(rows, cols);
  m(i, j) = 1.0;
  return m;
}

CMat CMat::adjoint() const {
  CMat r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

bool CMat::is_diagonal(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && std::abs((*this)(i, j)) > tol) return false;
  return true;
}

CMat& CMat::operator+=(const CMat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInput("CMat +: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CMat& CMat::operator-=(const CMat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInput("CMat -: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMat operator*(const CMat& a, const CMat& b) {
  if (a.cols_ != b.rows_) throw InvalidInput("CMat *: inner dimensions differ");
  CMat r(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

double frobenius_norm(const CMat& m) {
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

cplx frobenius_inner(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("frobenius_inner: shape mismatch");
  cplx s{};
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) s += std::conj(ea[k]) * eb[k];
  return s;
}

namespace {

// Gram matrix of the smaller side: m m* when rows <= cols, else m* m.
CMat small_gram(const CMat& m, bool& left_side) {
  left_side = m.rows() <= m.cols();
  const std::size_t n = left_side ? m.rows() : m.cols();
  CMat g(n, n);
  if (left_side) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        cplx s{};
        for (std::size_t k = 0; k < m.cols(); ++k) s += m(i, k) * std::conj(m(j, k));
        g(i, j) = s;
        g(j, i) = std::conj(s);
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        cplx s{};
        for (std::size_t k = 0; k < m.rows(); ++k) s += std::conj(m(k, i)) * m(k, j);
        g(i, j) = s;
        g(j, i) = std::conj(s);
      }
  }
  for (std::size_t i = 0; i < n; ++i) g(i, i) = g(i, i).real();
  return g;
}

void check_square(const CMat& m, const char* who) {
  if (m.empty()) throw InvalidInput(std::string(who) + ": empty matrix");
  if (m.rows() != m.cols()) throw InvalidInput(std::string(who) + ": matrix is not square");
}

// Jacobi on an exactly hermitian copy; returns unsorted values, vectors in columns.
void jacobi(CMat& a, CMat& v) {
  const std::size_t n = a.rows();
  v = CMat::identity(n);
  if (n == 1) return;
  const double scale = frobenius_norm(a);
  if (scale == 0.0) return;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        const double abs_b = std::abs(b);
        if (abs_b <= 1e-300 || abs_b <= 1e-18 * scale) continue;
        const cplx phase = b / abs_b;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * abs_b);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx g_qp = -s * std::conj(phase);
        const cplx g_qq = c * std::conj(phase);
        // a <- a G
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp + g_qp * akq;
          a(k, q) = s * akp + g_qq * akq;
        }
        // a <- G* a
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk + std::conj(g_qp) * aqk;
          a(q, k) = s * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp + g_qp * vkq;
          v(k, q) = s * vkp + g_qq * vkq;
        }
      }
    }
  }
}

HermEigen sorted_eigen(CMat a) {
  CMat v;
  jacobi(a, v);
  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermEigen out;
  out.values.resize(n);
  out.vectors = CMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace

HermEigen herm_eigen_decompose(const CMat& m) {
  check_square(m, "herm_eigen");
  const double scale = frobenius_norm(m);
  if (frobenius_norm(m - m.adjoint()) > kHermitianTol * scale) {
    throw InvalidInput("herm_eigen: matrix is not hermitian within tolerance");
  }
  CMat a = m + m.adjoint();
  a *= 0.5;
  return sorted_eigen(std::move(a));
}

RVec herm_eigen(const CMat& m) { return herm_eigen_decompose(m).values; }

double spectral_norm(const CMat& m) {
  if (m.empty()) throw InvalidInput("spectral_norm: dimension-zero matrix");
  bool left = true;
  const CMat g = small_gram(m, left);
  double top = 0.0;
  if (g.rows() == 1) {
    top = g(0, 0).real();
  } else if (g.rows() == 2) {
    const double a = g(0, 0).real();
    const double d = g(1, 1).real();
    const double h = 0.5 * (a - d);
    top = 0.5 * (a + d) + std::sqrt(h * h + std::norm(g(0, 1)));
  } else {
    top = sorted_eigen(g).values.back();
  }
  return std::sqrt(std::max(top, 0.0));
}

SingularTriple top_singular_triple(const CMat& m) {
  if (m.empty()) throw InvalidInput("top_singular_triple: dimension-zero matrix");
  bool left = true;
  const CMat g = small_gram(m, left);
  const HermEigen eig = sorted_eigen(g);
  const std::size_t n = g.rows();
  SingularTriple out;
  out.sigma = std::sqrt(std::max(eig.values[n - 1], 0.0));
  const double second = n >= 2 ? std::sqrt(std::max(eig.values[n - 2], 0.0)) : 0.0;
  out.gap = out.sigma - second;

  CVec top(n);
  for (std::size_t i = 0; i < n; ++i) top[i] = eig.vectors(i, n - 1);
  const std::size_t other = left ? m.cols() : m.rows();
  CVec image(other);
  if (left) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) image[j] += std::conj(m(i, j)) * top[i];
  } else {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) image[i] += m(i, j) * top[j];
  }
  if (out.sigma > 0.0) {
    for (auto& z : image) z /= out.sigma;
  } else {
    std::fill(image.begin(), image.end(), cplx{});
    image[0] = 1.0;
  }
  if (left) {
    out.left = std::move(top);
    out.right = std::move(image);
  } else {
    out.right = std::move(top);
    out.left = std::move(image);
  }
  return out;
}

CMat psd_sqrt(const CMat& m) {
  const HermEigen eig = herm_eigen_decompose(m);
  double big = 1.0;
  for (double l : eig.values) big = std::max(big, std::abs(l));
  const std::size_t n = m.rows();
  CMat out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double l = eig.values[k];
    if (l < -kEigenClamp * big) throw InvalidInput("psd_sqrt: matrix has a negative eigenvalue");
    const double r = std::sqrt(std::max(l, 0.0));
    if (r == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += r * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
  }
  return out;
}

CMat block2x2(const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
    throw InvalidInput("block2x2: incompatible block dimensions");
  }
  return vstack(hstack(a, b), hstack(c, d));
}

CMat hstack(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows()) throw InvalidInput("hstack: row counts differ");
  CMat r(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
  }
  return r;
}

CMat vstack(const CMat& a, const CMat& b) {
  if (a.cols() != b.cols()) throw InvalidInput("vstack: column counts differ");
  CMat r(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, j) = b(i, j);
  return r;
}

std::vector<RVec> real_null_space(const std::vector<RVec>& columns, double rel_tol) {
  const std::size_t n = columns.size();
  if (n == 0) return {};
  CMat normal(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < columns[i].size(); ++r) s += columns[i][r] * columns[j][r];
      normal(i, j) = s;
      normal(j, i) = s;
    }
  const HermEigen eig = herm_eigen_decompose(normal);
  const double cut = rel_tol * std::max(1.0, eig.values.back());
  std::vector<RVec> out;
  auto add = [&](RVec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += q[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv <= 1e-8) return;
    for (double& x : v) x /= nv;
    out.push_back(std::move(v));
  };
  // Eigenvectors of a real symmetric matrix may carry a complex phase; both parts lie in the null space.
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] > cut) continue;
    RVec re(n);
    RVec im(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = eig.vectors(i, k).real();
      im[i] = eig.vectors(i, k).imag();
    }
    add(std::move(re));
    add(std::move(im));
  }
  return out;
}

}  // namespace opcert
