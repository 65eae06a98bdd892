#include "opcert/hermit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opcert/errors.hpp"

namespace opcert {

namespace {

double block_norm(const ConcreteOpSpace& space, const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  BlockAffineMap map(space, 2, 2, 0);
  map.set_constant(0, 0, a);
  map.set_constant(0, 1, b);
  map.set_constant(1, 0, c);
  map.set_constant(1, 1, d);
  return map.norm({});
}

CMat as_column(const CVec& v) { return CMat(v.size(), 1, v); }

CVec scaled(const CVec& v, cplx s) {
  CVec out = v;
  for (auto& z : out) z *= s;
  return out;
}

std::size_t gram_rank(const CMat& gram, double rel_tol) {
  if (gram.rows() == 0) return 0;
  const RVec ev = herm_eigen(gram);
  const double top = std::max(ev.back(), 0.0);
  if (top == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double e) { return e > rel_tol * top; }));
}

std::vector<CVec> complex_orthonormal(const std::vector<CVec>& vectors) {
  std::vector<CMat> family;
  for (const auto& v : vectors) extend_orthonormal(family, as_column(v), 1e-8);
  std::vector<CVec> out;
  for (const auto& f : family) out.emplace_back(f.entries().begin(), f.entries().end());
  return out;
}

// Null space of x -> x* u - u* x over real coefficient directions.
std::vector<CVec> ambient_hermitians(const ConcreteOpSpace& space, const CVec& u) {
  const Ambient& amb = space.ambient();
  const std::size_t d = space.dim();
  const CMat um = space.embed(u);
  std::vector<RVec> columns;
  for (std::size_t k = 0; k < 2 * d; ++k) {
    CVec e(d);
    e[k / 2] = (k % 2 == 0) ? cplx(1.0) : cplx(0.0, 1.0);
    const CMat x = space.embed(e);
    const CMat c = amb.multiply(amb.adjoint(x), um) - amb.multiply(amb.adjoint(um), x);
    RVec col;
    col.reserve(2 * c.size());
    for (const auto& z : c.entries()) {
      col.push_back(z.real());
      col.push_back(z.imag());
    }
    columns.push_back(std::move(col));
  }
  std::vector<CVec> out;
  for (const auto& v : real_null_space(columns)) out.push_back(ConcreteOpSpace::coeffs_from_real(v));
  return out;
}

std::vector<CVec> intrinsic_hermitians(const ConcreteOpSpace& space, const CVec& u, const RVec& t_grid) {
  const std::size_t d = space.dim();
  std::vector<CVec> candidates;
  auto unit_vec = [&](std::size_t k) {
    CVec e(d);
    e[k] = 1.0;
    return e;
  };
  const cplx phases[] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};
  for (std::size_t k = 0; k < d; ++k) {
    candidates.push_back(unit_vec(k));
    candidates.push_back(scaled(unit_vec(k), cplx(0.0, 1.0)));
  }
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = k + 1; l < d; ++l)
      for (cplx w : phases)
        for (cplx outer : {cplx(1.0), cplx(0.0, 1.0)}) {
          CVec c(d);
          c[k] = outer;
          c[l] = outer * w;
          candidates.push_back(std::move(c));
        }
  std::vector<CMat> real_family;
  std::vector<CVec> out;
  for (const auto& c : candidates) {
    if (is_u_hermitian(space, u, c, t_grid).verdict != Verdict::Pass) continue;
    const RVec p = ConcreteOpSpace::real_from_coeffs(c);
    CMat v(p.size(), 1);
    for (std::size_t i = 0; i < p.size(); ++i) v(i, 0) = p[i];
    if (extend_orthonormal(real_family, v, 1e-8)) out.push_back(c);
  }
  return out;
}

}  // namespace

std::size_t real_rank(const std::vector<CVec>& vectors, double rel_tol) {
  const std::size_t n = vectors.size();
  CMat gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < vectors[i].size(); ++k) s += (std::conj(vectors[i][k]) * vectors[j][k]).real();
      gram(i, j) = s;
    }
  return gram_rank(gram, rel_tol);
}

std::size_t complex_rank(const std::vector<CVec>& vectors, double rel_tol) {
  const std::size_t n = vectors.size();
  CMat gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t k = 0; k < vectors[i].size(); ++k) s += std::conj(vectors[i][k]) * vectors[j][k];
      gram(i, j) = s;
    }
  return gram_rank(gram, rel_tol);
}

HermitianProfile is_u_hermitian(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                double tol) {
  if (t_grid.empty()) throw InvalidInput("is_u_hermitian: t grid is empty");
  HermitianProfile prof;
  prof.t_grid = t_grid;
  const Ambient& amb = space.ambient();
  const CMat um = space.embed(u);
  const CMat xm = space.embed(x);
  const double xn = amb.norm(xm);
  prof.scale = xn > 1.0 ? 1.0 / xn : 1.0;
  const CMat xb = xm * cplx(prof.scale);
  prof.min_slack = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (!(t > 0)) throw InvalidInput("is_u_hermitian: t values must be positive");
    const CMat tu = um * cplx(t);
    const double block = block_norm(space, tu, xb, xb * cplx(-1.0), tu);
    const double ms = std::sqrt(t * t + 1.0) - block;
    const double plus = amb.norm(um + xm * cplx(0.0, t));
    const double minus = amb.norm(um + xm * cplx(0.0, -t));
    const double bound = 1.0 + t * t * xn * xn;
    prof.matricial_slack.push_back(ms);
    prof.scalar_slack_pos.push_back(bound - plus * plus);
    prof.scalar_slack_neg.push_back(bound - minus * minus);
    // The scalar slack scales like t^2; compare it relative to its bound.
    prof.min_slack = std::min({prof.min_slack, ms, (bound - plus * plus) / bound, (bound - minus * minus) / bound});
  }
  prof.verdict = prof.min_slack >= -tol ? Verdict::Pass : Verdict::Fail;
  return prof;
}

CertificateReport is_u_positive(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                double tol) {
  CertificateReport r;
  r.check = "u-positive";
  r.bound = Bound::Exact;
  r.scope = Scope::Intrinsic;
  r.witness = x;
  const Ambient& amb = space.ambient();
  const CMat um = space.embed(u);
  const CMat xm = space.embed(x);
  const double xn = amb.norm(xm);
  if (xn == 0.0) {
    r.verdict = Verdict::Pass;
    r.notes.emplace_back("x = 0 is positive");
    return r;
  }
  const HermitianProfile herm = is_u_hermitian(space, u, x, t_grid, tol);
  const double order_gap = amb.norm(um * cplx(xn) - xm) - xn;
  r.metrics.emplace_back("hermitian_min_slack", herm.min_slack);
  r.metrics.emplace_back("order_excess", order_gap);
  bool pass = herm.verdict == Verdict::Pass && order_gap <= tol * std::max(1.0, xn);
  r.margin = std::max(-herm.min_slack, order_gap);
  if (xn <= 1.0 + 1e-12) {
    double worst = std::numeric_limits<double>::infinity();
    const CMat diff = um - xm;
    for (double t : t_grid) {
      const CMat tu = um * cplx(t);
      worst = std::min(worst, std::sqrt(t * t + 1.0) - block_norm(space, tu, diff, diff * cplx(-1.0), tu));
    }
    r.metrics.emplace_back("matricial_min_slack", worst);
    pass = pass && worst >= -tol;
  }
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  return r;
}

DeltaSpan delta_span(const ConcreteOpSpace& space, const CVec& u, const TroClosure* closure, const RVec& t_grid) {
  DeltaSpan out;
  if (closure != nullptr && ambient_unitary_check(*closure, u).passed()) {
    out.ambient_route = true;
    out.scope = closure->scope();
    out.hermitian_basis = ambient_hermitians(space, u);
  } else {
    out.scope = Scope::Intrinsic;
    out.hermitian_basis = intrinsic_hermitians(space, u, t_grid);
  }
  out.complex_basis = complex_orthonormal(out.hermitian_basis);
  return out;
}

CertificateReport operator_system_check(const ConcreteOpSpace& space, const CVec& u, const TroClosure* closure,
                                        const RVec& t_grid) {
  const DeltaSpan delta = delta_span(space, u, closure, t_grid);
  CertificateReport r;
  r.check = "hermitians-span";
  r.scope = delta.scope;
  const std::size_t d = space.dim();
  const std::size_t cd = delta.complex_basis.size();
  r.metrics.emplace_back("real_dim", static_cast<double>(delta.hermitian_basis.size()));
  r.metrics.emplace_back("complex_dim", static_cast<double>(cd));
  r.metrics.emplace_back("space_dim", static_cast<double>(d));
  r.margin = static_cast<double>(d - cd);
  if (delta.ambient_route) {
    r.bound = Bound::Exact;
    r.verdict = cd == d ? Verdict::Pass : Verdict::Fail;
  } else {
    // Pairwise filtering only ever finds part of the hermitian subspace.
    r.bound = Bound::LowerBound;
    r.verdict = cd == d ? Verdict::Pass : Verdict::Inconclusive;
    r.notes.emplace_back("intrinsic route: hermitians found among pairwise basis combinations");
  }
  return r;
}

}  // namespace opcert
