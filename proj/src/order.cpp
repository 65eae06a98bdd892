#include "opcert/order.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "opcert/errors.hpp"
#include "opcert/hermit.hpp"

namespace opcert {

namespace {

constexpr int kMaxNnlsIterations = 20000;
constexpr double kNnlsStationarity = 1e-8;

double real_inner(const CMat& a, const CMat& b) { return frobenius_inner(a, b).real(); }

// Smallest eigenvalue of the hermitian part of u* x and its antihermitian defect.
std::pair<double, double> ambient_positivity(const Ambient& amb, const CMat& um, const CMat& xm) {
  const CMat a = amb.multiply(amb.adjoint(um), xm);
  const double asym = amb.norm(a - amb.adjoint(a));
  const CMat h = (a + amb.adjoint(a)) * cplx(0.5);
  double lo = 0.0;
  if (amb.diagonal()) {
    lo = h(0, 0).real();
    for (std::size_t i = 0; i < h.rows(); ++i) lo = std::min(lo, h(i, 0).real());
  } else {
    lo = herm_eigen(h).front();
  }
  return {lo, asym};
}

// Positive rank-one pieces u P_i of a u-hermitian h, where u* h = sum lambda_i P_i.
std::vector<CMat> spectral_parts(const Ambient& amb, const CMat& um, const CMat& h) {
  const CMat a = amb.multiply(amb.adjoint(um), h);
  const CMat herm = (a + amb.adjoint(a)) * cplx(0.5);
  std::vector<CMat> out;
  if (amb.diagonal()) {
    for (std::size_t i = 0; i < herm.rows(); ++i) {
      CMat p(herm.rows(), 1);
      p(i, 0) = 1.0;
      out.push_back(amb.multiply(um, p));
    }
    return out;
  }
  const HermEigen eig = herm_eigen_decompose(herm);
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    CMat p(herm.rows(), herm.cols());
    for (std::size_t i = 0; i < herm.rows(); ++i)
      for (std::size_t j = 0; j < herm.cols(); ++j) p(i, j) = eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    out.push_back(amb.multiply(um, p));
  }
  return out;
}

CertificateReport sampled_report(const char* check) {
  CertificateReport r;
  r.check = check;
  r.bound = Bound::LowerBound;
  r.scope = Scope::Intrinsic;
  r.verdict = Verdict::Pass;
  return r;
}

}  // namespace

Cone Cone::make(ConcreteOpSpace space, std::vector<CVec> generators) {
  for (const auto& g : generators) {
    if (g.size() != space.dim()) throw InvalidInput("cone: generator coefficient count differs from dimension");
    if (space.norm(g) == 0.0) throw InvalidInput("cone: generators must be nonzero");
  }
  return Cone{std::move(space), std::move(generators)};
}

Cone Cone::without(std::size_t generator) const {
  if (generator >= generators.size()) throw InvalidInput("cone: generator index out of range");
  Cone c = *this;
  c.generators.erase(c.generators.begin() + static_cast<std::ptrdiff_t>(generator));
  return c;
}

ConeMembership cone_membership(const Cone& cone, const CVec& x, double tol) {
  const ConcreteOpSpace& space = cone.space;
  const CMat target = space.embed(x);
  const double scale = std::max(1.0, frobenius_norm(target));
  ConeMembership out;
  const std::size_t n = cone.generators.size();
  if (n == 0) {
    out.residual = frobenius_norm(target);
    out.member = out.residual <= tol * scale;
    return out;
  }
  std::vector<CMat> gens;
  for (const auto& g : cone.generators) gens.push_back(space.embed(g));
  CMat gram(n, n);
  RVec rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) gram(i, j) = real_inner(gens[i], gens[j]);
    rhs[i] = real_inner(gens[i], target);
  }
  const double lipschitz = std::max(herm_eigen(gram).back(), 1e-300);

  // f(w) = 1/2 |G w - x|^2, grad = Gram w - rhs.
  auto gradient = [&](const RVec& w) {
    RVec g(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = -rhs[i];
      for (std::size_t j = 0; j < n; ++j) s += gram(i, j).real() * w[j];
      g[i] = s;
    }
    return g;
  };
  RVec w(n, 0.0);
  RVec z = w;
  double momentum = 1.0;
  int it = 0;
  for (; it < kMaxNnlsIterations; ++it) {
    const RVec g = gradient(z);
    RVec next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = std::max(0.0, z[i] - g[i] / lipschitz);
    // Projected-gradient stationarity at the new point.
    const RVec gn = gradient(next);
    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pg = next[i] > 0.0 ? gn[i] : std::min(0.0, gn[i]);
      stat = std::max(stat, std::abs(pg));
    }
    const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    double progress = 0.0;
    for (std::size_t i = 0; i < n; ++i) progress += (next[i] - w[i]) * gn[i];
    for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + ((momentum - 1.0) / m_next) * (next[i] - w[i]);
    // Restart the momentum when the objective would increase.
    if (progress > 0.0) {
      z = next;
      momentum = 1.0;
    } else {
      momentum = m_next;
    }
    w = std::move(next);
    if (stat <= kNnlsStationarity * scale) break;
  }
  CMat combo = space.ambient().zero();
  for (std::size_t k = 0; k < n; ++k) combo += gens[k] * cplx(w[k]);
  out.weights = std::move(w);
  out.residual = frobenius_norm(combo - target);
  out.member = out.residual <= tol * scale;
  out.iterations = it;
  return out;
}

CertificateReport norm_order_unit_check(const Cone& cone, const CVec& u, const std::vector<CVec>& hermitian_basis,
                                        const SolverConfig& config, int samples) {
  const ConcreteOpSpace& space = cone.space;
  CertificateReport r = sampled_report("norm-order-unit");
  const ConeMembership unit = cone_membership(cone, u);
  r.metrics.emplace_back("unit_residual", unit.residual);
  if (!unit.member) {
    r.verdict = Verdict::Fail;
    r.bound = Bound::Exact;
    r.margin = unit.residual;
    r.witness = u;
    r.notes.emplace_back("u is not in the cone");
    return r;
  }
  std::vector<CVec> probes;
  for (const auto& h : hermitian_basis) {
    probes.push_back(h);
    CVec neg = h;
    for (auto& z : neg) z = -z;
    probes.push_back(std::move(neg));
  }
  std::mt19937_64 rng(start_seed(config.seed, 0x0DE5ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < samples && !hermitian_basis.empty(); ++s) {
    CVec x(space.dim());
    for (const auto& h : hermitian_basis) {
      const double c = normal(rng);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += c * h[k];
    }
    probes.push_back(std::move(x));
  }
  double worst = 0.0;
  for (const auto& x : probes) {
    const double xn = space.norm(x);
    if (xn == 0.0) continue;
    CVec y(space.dim());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = (xn * u[k] - x[k]) / xn;
    const ConeMembership m = cone_membership(cone, y);
    if (m.residual > worst) {
      worst = m.residual;
      r.witness = x;
    }
    if (!m.member) r.verdict = Verdict::Fail;
  }
  r.margin = worst;
  r.metrics.emplace_back("samples", static_cast<double>(probes.size()));
  r.metrics.emplace_back("max_residual", worst);
  return r;
}

CertificateReport cone_equals_delta_plus(const Cone& cone, const CVec& u, const TroClosure& closure,
                                         const SolverConfig& config, int samples) {
  const ConcreteOpSpace& space = cone.space;
  const Ambient& amb = space.ambient();
  if (!ambient_unitary_check(closure, u).passed()) {
    throw PreconditionError("cone_equals_delta_plus: u is not unitary in the generated TRO");
  }
  const CMat um = space.embed(u);

  CertificateReport inner = sampled_report("cone-in-delta-plus");
  inner.bound = Bound::Exact;
  inner.scope = closure.scope();
  for (const auto& g : cone.generators) {
    const auto [lo, asym] = ambient_positivity(amb, um, space.embed(g));
    const double scale = std::max(1.0, space.norm(g));
    const double defect = std::max(-lo, asym) / scale;
    if (defect > inner.margin) {
      inner.margin = defect;
      inner.witness = g;
    }
    if (defect > kAmbientTol) inner.verdict = Verdict::Fail;
  }

  // Elements of Delta^u_+: spectral parts of hermitians, and h - lambda_min(u* h) u for random h.
  const DeltaSpan delta = delta_span(space, u, &closure, config.t_grid);
  std::vector<CMat> hermitians;
  for (const auto& h : delta.hermitian_basis) hermitians.push_back(space.embed(h));
  for (std::size_t j = 0; j < space.dim(); ++j) {
    const CMat b = space.basis()[j];
    const CMat star = amb.triple(um, b, um);
    hermitians.push_back((b + star) * cplx(0.5));
    hermitians.push_back((b - star) * cplx(0.0, 0.5));
  }
  std::vector<CMat> positives;
  for (const auto& h : hermitians) {
    if (space.membership(h).member && amb.norm(h) > 0.0)
      for (auto& p : spectral_parts(amb, um, h)) positives.push_back(std::move(p));
  }
  std::mt19937_64 rng(start_seed(config.seed, 0xDE17AULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < samples && !delta.hermitian_basis.empty(); ++s) {
    CMat h = amb.zero();
    for (const auto& hb : delta.hermitian_basis) h += space.embed(hb) * cplx(normal(rng));
    const auto [lo, asym] = ambient_positivity(amb, um, h);
    (void)asym;
    positives.push_back(h - um * cplx(lo));
  }

  CertificateReport outer = sampled_report("delta-plus-in-cone");
  outer.scope = closure.scope();
  std::size_t tested = 0;
  for (const auto& p : positives) {
    const Membership mem = space.membership(p);
    if (!mem.member) continue;  // spectral parts outside X are not elements of Delta^u_+
    const double pn = space.norm(mem.coeffs);
    if (pn == 0.0) continue;
    CVec x = mem.coeffs;
    for (auto& z : x) z /= pn;
    const ConeMembership m = cone_membership(cone, x);
    ++tested;
    if (m.residual > outer.margin) {
      outer.margin = m.residual;
      outer.witness = x;
    }
    if (!m.member) outer.verdict = Verdict::Fail;
  }
  outer.metrics.emplace_back("samples", static_cast<double>(tested));

  CertificateReport r;
  r.check = "cone-equals-delta-plus";
  r.bound = Bound::LowerBound;
  r.scope = closure.scope();
  r.verdict = combine(inner.verdict, outer.verdict);
  r.margin = std::max(inner.margin, outer.margin);
  r.witness = outer.margin >= inner.margin ? outer.witness : inner.witness;
  r.metrics.emplace_back("generator_positivity_defect", inner.margin);
  r.metrics.emplace_back("max_cone_residual", outer.margin);
  r.parts.push_back(std::move(inner));
  r.parts.push_back(std::move(outer));
  return r;
}

}  // namespace opcert
