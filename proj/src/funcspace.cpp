#include "opcert/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "opcert/errors.hpp"
#include "opcert/hermit.hpp"
#include "opcert/tro.hpp"

namespace opcert {

namespace {

constexpr int kPhiSteps = 32;
constexpr int kPsiSteps = 64;
constexpr double kRefineStop = 1e-10;

double pair_value(const CVec& f, const CVec& g, double phi, double psi) {
  const double c = std::cos(phi);
  const cplx t = std::polar(std::sin(phi), psi);
  double best = 0.0;
  for (std::size_t w = 0; w < f.size(); ++w) best = std::max(best, std::abs(c * f[w] + t * g[w]));
  return best;
}

CVec unit_vector(std::size_t d, std::size_t k) {
  CVec e(d);
  e[k] = 1.0;
  return e;
}

CMat identity2() { return CMat::identity(2); }

CatalogEntry matrix_entry(std::string name, std::string description, std::vector<CMat> basis, CVec unit) {
  ConcreteOpSpace space = ConcreteOpSpace::make(std::move(basis), std::move(unit));
  const bool exact = generate_tro(space).z_basis.size() == space.dim();
  return CatalogEntry{std::move(name), std::move(description), std::move(space), std::nullopt, exact, {}};
}

CatalogEntry function_entry(std::string name, std::string description, SampledFunctionSpace fs) {
  ConcreteOpSpace space = min_opspace(fs);
  return CatalogEntry{std::move(name), std::move(description), std::move(space), std::move(fs), true, {}};
}

CVec circle_points(std::size_t m, cplx center) {
  CVec z(m);
  for (std::size_t k = 0; k < m; ++k) {
    z[k] = center + std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
  }
  return z;
}

CVec conj_all(const CVec& v) {
  CVec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return std::conj(z); });
  return out;
}

}  // namespace

SampledFunctionSpace SampledFunctionSpace::make(std::vector<CVec> basis, std::optional<CVec> unit) {
  if (basis.empty()) throw InvalidInput("function space: basis is empty");
  SampledFunctionSpace fs;
  fs.points = basis.front().size();
  fs.basis = std::move(basis);
  fs.unit = std::move(unit);
  (void)min_opspace(fs);  // validates lengths, independence and the unit
  return fs;
}

CVec SampledFunctionSpace::evaluate(const CVec& coeffs) const {
  if (coeffs.size() != dim()) throw InvalidInput("function space: coefficient count differs from dimension");
  CVec out(points);
  for (std::size_t k = 0; k < dim(); ++k)
    for (std::size_t w = 0; w < points; ++w) out[w] += coeffs[k] * basis[k][w];
  return out;
}

double SampledFunctionSpace::norm(const CVec& coeffs) const {
  double best = 0.0;
  for (const auto& z : evaluate(coeffs)) best = std::max(best, std::abs(z));
  return best;
}

ConcreteOpSpace min_opspace(const SampledFunctionSpace& fspace) {
  return ConcreteOpSpace::make_diagonal(fspace.points, fspace.basis, fspace.unit);
}

double scalar_pair_sup(const SampledFunctionSpace& fspace, const CVec& f, const CVec& g) {
  const CVec fv = fspace.evaluate(f);
  const CVec gv = fspace.evaluate(g);
  const double half_pi = std::numbers::pi / 2.0;
  const double two_pi = 2.0 * std::numbers::pi;
  double best = -1.0;
  double bphi = 0.0;
  double bpsi = 0.0;
  for (int i = 0; i <= kPhiSteps; ++i)
    for (int j = 0; j < kPsiSteps; ++j) {
      const double phi = half_pi * i / kPhiSteps;
      const double psi = two_pi * j / kPsiSteps;
      const double v = pair_value(fv, gv, phi, psi);
      if (v > best) {
        best = v;
        bphi = phi;
        bpsi = psi;
      }
    }
  // Compass search around the best grid point.
  double dphi = half_pi / kPhiSteps;
  double dpsi = two_pi / kPsiSteps;
  while (dphi > kRefineStop || dpsi > kRefineStop) {
    bool moved = false;
    const double cand[4][2] = {{bphi + dphi, bpsi}, {bphi - dphi, bpsi}, {bphi, bpsi + dpsi}, {bphi, bpsi - dpsi}};
    for (const auto& c : cand) {
      const double phi = std::clamp(c[0], 0.0, half_pi);
      const double v = pair_value(fv, gv, phi, c[1]);
      if (v > best) {
        best = v;
        bphi = phi;
        bpsi = c[1];
        moved = true;
      }
    }
    if (!moved) {
      dphi *= 0.5;
      dpsi *= 0.5;
    }
  }
  return best;
}

CertificateReport scalar_unitary_check(const SampledFunctionSpace& fspace, const CVec& g, const SolverConfig& config,
                                       int random_samples, double tol) {
  if (g.size() != fspace.dim()) throw InvalidInput("scalar_unitary_check: coefficient count differs from dimension");
  if (tol <= 0.0) tol = sampling_tolerance(fspace.points);
  std::vector<CVec> probes;
  for (std::size_t k = 0; k < fspace.dim(); ++k) probes.push_back(unit_vector(fspace.dim(), k));
  std::mt19937_64 rng(start_seed(config.seed, 0xF5ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < random_samples; ++s) {
    CVec c(fspace.dim());
    for (auto& z : c) z = cplx(normal(rng), normal(rng));
    probes.push_back(std::move(c));
  }
  CertificateReport r;
  r.check = "function-unitary";
  r.bound = Bound::LowerBound;
  r.scope = Scope::Intrinsic;
  r.verdict = Verdict::Pass;
  const double target = std::sqrt(2.0);
  double worst = 0.0;
  for (auto f : probes) {
    const double n = fspace.norm(f);
    if (n == 0.0) continue;
    for (auto& z : f) z /= n;
    const double gap = std::abs(scalar_pair_sup(fspace, f, g) - target);
    if (gap > worst) {
      worst = gap;
      r.witness = f;
    }
    if (gap > tol) r.verdict = Verdict::Fail;
  }
  r.margin = worst;
  r.metrics.emplace_back("tolerance", tol);
  r.metrics.emplace_back("samples", static_cast<double>(probes.size()));
  return r;
}

GHermitianResult g_hermitian_solve(const SampledFunctionSpace& fspace, const CVec& g) {
  const CVec gv = fspace.evaluate(g);
  for (const auto& z : gv) {
    if (std::abs(std::abs(z) - 1.0) > kUnimodularTol) {
      throw PreconditionError("g_hermitian_solve: g is not unimodular on the sample set");
    }
  }
  const std::size_t d = fspace.dim();
  std::vector<RVec> columns;
  for (std::size_t k = 0; k < 2 * d; ++k) {
    const cplx phase = k % 2 == 0 ? cplx(1.0) : cplx(0.0, 1.0);
    RVec col(fspace.points);
    for (std::size_t w = 0; w < fspace.points; ++w) col[w] = (std::conj(gv[w]) * phase * fspace.basis[k / 2][w]).imag();
    columns.push_back(std::move(col));
  }
  GHermitianResult out;
  for (const auto& v : real_null_space(columns)) out.real_basis.push_back(ConcreteOpSpace::coeffs_from_real(v));
  out.complex_dim = complex_rank(out.real_basis);
  out.function_system = out.complex_dim == d;
  return out;
}

CertificateReport function_system_check(const SampledFunctionSpace& fspace, const CVec& g) {
  const GHermitianResult res = g_hermitian_solve(fspace, g);
  CertificateReport r;
  r.check = "function-system";
  r.bound = Bound::Exact;
  r.scope = Scope::Exact;
  r.verdict = res.function_system ? Verdict::Pass : Verdict::Fail;
  r.margin = static_cast<double>(fspace.dim() - res.complex_dim);
  r.witness = g;
  r.metrics.emplace_back("real_dim", static_cast<double>(res.real_basis.size()));
  r.metrics.emplace_back("complex_dim", static_cast<double>(res.complex_dim));
  r.metrics.emplace_back("space_dim", static_cast<double>(fspace.dim()));
  return r;
}

CertificateReport selfadjoint_unit_check(const SampledFunctionSpace& fspace, const CVec& v) {
  const ConcreteOpSpace space = min_opspace(fspace);
  for (std::size_t k = 0; k < fspace.dim(); ++k) {
    if (!space.membership(CMat(fspace.points, 1, conj_all(fspace.basis[k]))).member) {
      throw PreconditionError("selfadjoint_unit_check: X is not closed under conjugation");
    }
  }
  const CVec vv = fspace.evaluate(v);
  for (const auto& z : vv) {
    if (std::abs(z.imag()) > kUnimodularTol) throw PreconditionError("selfadjoint_unit_check: v is not real-valued");
    if (std::abs(std::abs(z) - 1.0) > kUnimodularTol) throw PreconditionError("selfadjoint_unit_check: v is not unimodular");
  }
  const GHermitianResult herm = g_hermitian_solve(fspace, v);
  double worst = 0.0;
  for (std::size_t k = 0; k < fspace.dim(); ++k) {
    const CVec& x = fspace.basis[k];
    double scale = 1.0;
    for (const auto& z : x) scale = std::max(scale, std::abs(z));
    for (std::size_t w = 0; w < fspace.points; ++w) {
      worst = std::max(worst, std::abs(vv[w] * std::conj(x[w]) * vv[w] - std::conj(x[w])) / scale);
    }
  }
  CertificateReport r;
  r.check = "selfadjoint-unit";
  r.bound = Bound::Exact;
  r.scope = Scope::Exact;
  r.verdict = herm.function_system && worst <= kAmbientTol ? Verdict::Pass : Verdict::Fail;
  r.margin = worst;
  r.witness = v;
  r.metrics.emplace_back("complex_dim", static_cast<double>(herm.complex_dim));
  r.metrics.emplace_back("involution_defect", worst);
  return r;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"m2-full",       "m2-upper",  "m2-sym3",
                                                 "circle-1zzbar", "circle-1z", "two-circles"};
  return names;
}

CatalogEntry catalog(const std::string& name, std::size_t points) {
  const auto E = [](std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); };
  if (name == "m2-full") {
    CatalogEntry e = matrix_entry(name, "all 2x2 matrices with unit I", {E(0, 0), E(0, 1), E(1, 0), E(1, 1)},
                                  CVec{1.0, 0.0, 0.0, 1.0});
    e.envelope_exact = true;
    return e;
  }
  if (name == "m2-upper") return matrix_entry(name, "span{I, E12} with unit I", {identity2(), E(0, 1)}, CVec{1.0, 0.0});
  if (name == "m2-sym3") {
    return matrix_entry(name, "span{I, E12, E21} with unit I", {identity2(), E(0, 1), E(1, 0)}, CVec{1.0, 0.0, 0.0});
  }
  if (points < 3) throw InvalidInput("catalog: function spaces need at least 3 sample points");
  if (name == "circle-1zzbar" || name == "circle-1zz̄") {
    const CVec z = circle_points(points, 0.0);
    auto fs = SampledFunctionSpace::make({CVec(points, 1.0), z, conj_all(z)}, CVec{1.0, 0.0, 0.0});
    CatalogEntry e = function_entry("circle-1zzbar", "span{1, z, conj z} on the sampled unit circle", std::move(fs));
    e.candidates.emplace_back("z", CVec{0.0, 1.0, 0.0});
    return e;
  }
  if (name == "circle-1z") {
    const CVec z = circle_points(points, 0.0);
    auto fs = SampledFunctionSpace::make({CVec(points, 1.0), z}, CVec{1.0, 0.0});
    CatalogEntry e = function_entry(name, "span{1, z} on the sampled unit circle", std::move(fs));
    e.candidates.emplace_back("z", CVec{0.0, 1.0});
    return e;
  }
  if (name == "two-circles") {
    const CVec c = circle_points(points, 1.0);
    CVec f = c;
    f.insert(f.end(), c.begin(), c.end());
    CVec g(2 * points, 1.0);
    std::fill(g.begin() + static_cast<std::ptrdiff_t>(points), g.end(), -1.0);
    auto fs = SampledFunctionSpace::make({CVec(2 * points, 1.0), g, f, conj_all(f)}, CVec{1.0, 0.0, 0.0, 0.0});
    CatalogEntry e = function_entry(
        name, "span{1, g, f, conj f} on two unit circles centred at 1; g = 1 on the first, -1 on the second",
        std::move(fs));
    e.candidates.emplace_back("g", CVec{0.0, 1.0, 0.0, 0.0});
    return e;
  }
  throw InvalidInput("catalog: unknown name '" + name + "'");
}

}  // namespace opcert
