#include "opcert/sysdetect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "opcert/errors.hpp"
#include "opcert/hermit.hpp"

namespace opcert {

namespace {

constexpr double kBallSlack = 1e-9;
// A start this far below the certification tolerance settles the verdict.
constexpr double kEarlyStopFraction = 1e-2;

// One block map per t, with y as the only variable.
std::vector<BlockAffineMap> partner_maps(const ConcreteOpSpace& space, const CVec& u, const CVec& x,
                                         const RVec& t_grid) {
  const CMat um = space.embed(u);
  const CMat xm = space.embed(x);
  std::vector<BlockAffineMap> maps;
  for (double t : t_grid) {
    if (!(t > 0)) throw InvalidInput("partner search: t values must be positive");
    BlockAffineMap m(space, 2, 2, 1);
    m.set_constant(0, 0, um * cplx(t));
    m.set_constant(0, 1, xm);
    m.set_constant(1, 1, um * cplx(t));
    m.set_variable(1, 0, 0);
    maps.push_back(std::move(m));
  }
  return maps;
}

CVec random_sphere_element(const ConcreteOpSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVec c(space.dim());
  for (auto& z : c) z = cplx(normal(rng), normal(rng));
  const double n = space.norm(c);
  for (auto& z : c) z /= n;
  return c;
}

CertificateReport partner_report(const PartnerSearchResult& res, std::string check) {
  CertificateReport r;
  r.check = std::move(check);
  r.verdict = res.verdict;
  r.margin = res.value;
  r.bound = Bound::UpperBound;
  r.scope = Scope::Intrinsic;
  r.witness = res.x;
  r.diagnostics = res.diagnostics;
  for (std::size_t k = 0; k < res.t_grid.size(); ++k) {
    r.metrics.emplace_back("residual_t=" + short_number(res.t_grid[k]), res.residuals[k]);
  }
  return r;
}

}  // namespace

double partner_objective(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const CVec& y,
                         const RVec& t_grid) {
  const auto maps = partner_maps(space, u, x, t_grid);
  const RVec p = ConcreteOpSpace::real_from_coeffs(y);
  double worst = 0.0;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    worst = std::max(worst, maps[k].norm(p) - std::sqrt(t_grid[k] * t_grid[k] + 1.0));
  }
  return worst;
}

PartnerSearchResult find_partner(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                 const SolverConfig& config) {
  if (t_grid.empty()) throw InvalidInput("find_partner: t grid is empty");
  if (x.size() != space.dim() || u.size() != space.dim()) {
    throw InvalidInput("find_partner: coefficient count differs from dimension");
  }
  const double xn = space.norm(x);
  if (xn > 1.0 + kBallSlack) {
    throw PreconditionError("find_partner: ||x|| = " + std::to_string(xn) + " exceeds 1");
  }
  const auto maps = partner_maps(space, u, x, t_grid);
  RVec level(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) level[k] = std::sqrt(t_grid[k] * t_grid[k] + 1.0);

  Objective obj;
  obj.dim = 2 * space.dim();
  obj.value = [&](std::span<const double> p) {
    double worst = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) worst = std::max(worst, maps[k].norm(p) - level[k]);
    return worst;
  };
  obj.subgradient = [&](std::span<const double> p, std::span<double> g, bool& fd) {
    std::size_t arg = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const double e = maps[k].norm(p) - level[k];
      if (e > worst) {
        worst = e;
        arg = k;
      }
    }
    fd = false;
    if (worst <= 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return 0.0;
    }
    maps[arg].subgradient(p, g, fd);
    return worst;
  };
  MinimizeOptions opts;
  opts.stop_below = kEarlyStopFraction * config.cert_tol;
  const SolverResult res = minimize_over_ball(
      obj, [&](std::span<const double> p) { return space.norm(ConcreteOpSpace::coeffs_from_real(p)); }, config, opts);

  PartnerSearchResult out;
  out.x = x;
  out.y = ConcreteOpSpace::coeffs_from_real(res.argbest);
  out.t_grid = t_grid;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    out.residuals.push_back(std::max(0.0, maps[k].norm(res.argbest) - level[k]));
  }
  out.value = *std::max_element(out.residuals.begin(), out.residuals.end());
  out.history = res.history;
  out.diagnostics = res.diagnostics;
  out.verdict = classify_infimum(out.value, config.cert_tol, config.fail_threshold(), res.diagnostics.converged);
  return out;
}

CertificateReport detect_operator_system(const ConcreteOpSpace& space, const CVec& u, const SolverConfig& config,
                                         const DetectOptions& options) {
  std::vector<CVec> probes;
  for (std::size_t j = 0; j < space.dim(); ++j) {
    CVec e(space.dim());
    e[j] = 1.0;
    e[j] = 1.0 / space.norm(e);
    probes.push_back(std::move(e));
  }
  for (int s = 0; s < options.ball_samples; ++s) {
    probes.push_back(random_sphere_element(space, start_seed(config.seed ^ 0x5EED5EEDULL, static_cast<std::uint64_t>(s))));
  }

  CertificateReport report;
  report.check = "operator-system";
  report.verdict = Verdict::Pass;
  report.bound = Bound::UpperBound;
  report.scope = Scope::Intrinsic;
  double worst = -1.0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const PartnerSearchResult res = find_partner(space, u, probes[k], config.t_grid, config);
    CertificateReport part = partner_report(res, (k < space.dim() ? "partner-basis-" : "partner-sample-") +
                                                     std::to_string(k < space.dim() ? k : k - space.dim()));
    report.verdict = combine(report.verdict, res.verdict);
    report.diagnostics.absorb(res.diagnostics);
    report.diagnostics.starts += res.diagnostics.starts;
    if (res.value > worst) {
      worst = res.value;
      report.witness = res.x;
      report.diagnostics.best_start = res.diagnostics.best_start;
    }
    report.parts.push_back(std::move(part));
  }
  report.margin = worst;
  report.diagnostics.converged = report.verdict != Verdict::Inconclusive;

  if (options.closure != nullptr) {
    CertificateReport cross = operator_system_check(space, u, options.closure, config.t_grid);
    report.metrics.emplace_back("hermitian_complex_dim", cross.metric("complex_dim"));
    if (cross.verdict != Verdict::Inconclusive && report.verdict != Verdict::Inconclusive &&
        cross.verdict != report.verdict) {
      report.notes.emplace_back("intrinsic verdict disagrees with the u-hermitian span check");
    }
    report.parts.push_back(std::move(cross));
  }
  return report;
}

InvolutionRecovery recover_involution(const ConcreteOpSpace& space, const CVec& u, const CVec& x, double t,
                                      const SolverConfig& config) {
  if (!(t > 0)) throw InvalidInput("recover_involution: t must be positive");
  const PartnerSearchResult res = find_partner(space, u, x, RVec{t}, config);
  if (res.value > config.cert_tol) {
    throw PreconditionError("recover_involution: no partner within tolerance (residual " +
                            std::to_string(res.value) + "); the space does not look like an operator system");
  }
  InvolutionRecovery out;
  out.coeffs = res.y;
  for (auto& z : out.coeffs) z = -z;
  out.residual = res.value;
  out.t = t;
  out.bound = recovery_bound(t) + config.cert_tol;
  out.diagnostics = res.diagnostics;
  return out;
}

CertificateReport t1_insufficiency_probe(const ConcreteOpSpace& space, const CVec& u, const CVec& x,
                                         const SolverConfig& config) {
  const PartnerSearchResult at_one = find_partner(space, u, x, RVec{1.0}, config);
  const PartnerSearchResult full = find_partner(space, u, x, config.t_grid, config);
  CertificateReport r;
  r.check = "t1-insufficiency";
  r.bound = Bound::UpperBound;
  r.scope = Scope::Intrinsic;
  r.witness = x;
  const bool t1_ok = at_one.value <= kT1Tolerance;
  r.metrics.emplace_back("t1_residual", at_one.value);
  r.metrics.emplace_back("full_residual", full.value);
  r.metrics.emplace_back("t1_satisfiable", t1_ok ? 1.0 : 0.0);
  r.margin = at_one.value;
  if (t1_ok && full.verdict == Verdict::Fail) {
    r.verdict = Verdict::Pass;
  } else if (full.verdict == Verdict::Inconclusive || (!t1_ok && !at_one.diagnostics.converged)) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = Verdict::Fail;
    r.notes.emplace_back(t1_ok ? "full-grid detection also passes" : "the t = 1 constraint alone is not satisfiable");
  }
  r.diagnostics.absorb(at_one.diagnostics);
  r.diagnostics.absorb(full.diagnostics);
  r.parts.push_back(partner_report(at_one, "partner-t1"));
  r.parts.push_back(partner_report(full, "partner-grid"));
  return r;
}

}  // namespace opcert
