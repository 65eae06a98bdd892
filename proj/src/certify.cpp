#include "opcert/certify.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <string>

#include "opcert/errors.hpp"

namespace opcert {

std::string_view to_string(Direction d) { return d == Direction::Row ? "row" : "column"; }

namespace {

// Bound check slack for 1 <= ||[u_n x]||^2 <= 1 + ||x||^2.
constexpr double kBoundSlack = 1e-9;
constexpr double kUnitNormSlack = 1e-6;

BlockAffineMap stacked_map(const ConcreteOpSpace& space, const CVec& u, std::size_t n, Direction dir) {
  const CMat um = space.embed(u);
  const bool row = dir == Direction::Row;
  BlockAffineMap map(space, row ? n : 2 * n, row ? 2 * n : n, n * n);
  for (std::size_t i = 0; i < n; ++i) {
    map.set_constant(i, i, um);
    for (std::size_t j = 0; j < n; ++j) {
      if (row) {
        map.set_variable(i, n + j, i * n + j);
      } else {
        map.set_variable(n + i, j, i * n + j);
      }
    }
  }
  return map;
}

BlockAffineMap element_map(const ConcreteOpSpace& space, std::size_t n) {
  BlockAffineMap map(space, n, n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) map.set_variable(i, j, i * n + j);
  return map;
}

RVec to_params(const AmplifiedElement& x) { return ConcreteOpSpace::real_from_coeffs(x.flatten()); }

AmplifiedElement from_params(std::span<const double> params, std::size_t n, std::size_t d) {
  AmplifiedElement x;
  x.level = n;
  for (std::size_t k = 0; k < n * n; ++k) {
    x.grid.push_back(ConcreteOpSpace::coeffs_from_real(params.subspan(2 * d * k, 2 * d)));
  }
  return x;
}

DefectProfile search_defect(const ConcreteOpSpace& space, const CVec& u, std::size_t n, Direction dir,
                            const SolverConfig& config, const AmplifiedElement* warm) {
  if (n == 0) throw InvalidInput("defect: level must be positive");
  if (u.size() != space.dim()) throw InvalidInput("defect: unit coefficient count differs from dimension");
  const double unorm = space.norm(u);
  if (unorm > 1.0 + kUnitNormSlack) {
    throw PreconditionError("defect: ||u|| = " + std::to_string(unorm) + " exceeds 1");
  }
  const BlockAffineMap stacked = stacked_map(space, u, n, dir);
  const BlockAffineMap plain = element_map(space, n);
  auto violations = std::make_shared<std::atomic<long>>(0);

  Objective obj;
  obj.dim = plain.dim();
  obj.value = [&](std::span<const double> p) {
    const double s = stacked.norm(p);
    const double x = plain.norm(p);
    return 1.0 + x * x - s * s;
  };
  obj.subgradient = [&, violations](std::span<const double> p, std::span<double> g, bool& fd) {
    RVec gs(g.size());
    bool fd_s = false;
    bool fd_x = false;
    const double s = stacked.subgradient(p, gs, fd_s);
    const double x = plain.subgradient(p, g, fd_x);
    if (s * s < 1.0 - kBoundSlack || s * s > 1.0 + x * x + kBoundSlack) violations->fetch_add(1);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * x * g[k] - 2.0 * s * gs[k];
    fd = fd_s || fd_x;
    return 1.0 + x * x - s * s;
  };

  SphereOptions opts;
  if (warm != nullptr) {
    if (warm->level > n) throw InvalidInput("defect: warm start exceeds the search level");
    opts.warm_starts.push_back(to_params(warm->level == n ? *warm : embed_corner(*warm, n)));
  }
  const SolverResult res = maximize_over_sphere(obj, [&](std::span<const double> p) { return plain.norm(p); },
                                                config, opts);
  DefectProfile out;
  out.level = n;
  out.direction = dir;
  out.worst_defect = std::max(0.0, res.value);
  out.witness = from_params(res.argbest, n, space.dim());
  out.diagnostics = res.diagnostics;
  out.diagnostics.bound_violations = violations->load();
  out.verdict = classify_supremum(out.worst_defect, config.cert_tol, config.fail_threshold(), res.diagnostics.converged);
  return out;
}

CertificateReport certify_levels(const char* name, const ConcreteOpSpace& space, const CVec& u,
                                 std::size_t max_level, const SolverConfig& config, bool rows, bool cols) {
  if (max_level == 0) throw InvalidInput("certify: max level must be positive");
  CertificateReport report;
  report.check = name;
  report.verdict = Verdict::Pass;
  report.bound = Bound::LowerBound;
  report.scope = Scope::Intrinsic;
  double worst = -1.0;
  for (Direction dir : {Direction::Row, Direction::Column}) {
    if ((dir == Direction::Row && !rows) || (dir == Direction::Column && !cols)) continue;
    AmplifiedElement previous;
    for (std::size_t n = 1; n <= max_level; ++n) {
      const DefectProfile prof = search_defect(space, u, n, dir, config, n > 1 ? &previous : nullptr);
      previous = prof.witness;
      CertificateReport part;
      part.check = std::string(to_string(dir)) + "-defect-level-" + std::to_string(n);
      part.verdict = prof.verdict;
      part.margin = prof.worst_defect;
      part.bound = Bound::LowerBound;
      part.scope = Scope::Intrinsic;
      part.witness = prof.witness.flatten();
      part.diagnostics = prof.diagnostics;
      part.metrics.emplace_back("level", static_cast<double>(n));
      report.metrics.emplace_back(part.check, prof.worst_defect);
      report.verdict = combine(report.verdict, prof.verdict);
      report.diagnostics.absorb(prof.diagnostics);
      report.diagnostics.starts += prof.diagnostics.starts;
      if (prof.worst_defect > worst) {
        worst = prof.worst_defect;
        report.witness = part.witness;
        report.diagnostics.best_start = prof.diagnostics.best_start;
      }
      report.parts.push_back(std::move(part));
    }
  }
  report.margin = std::max(0.0, worst);
  report.diagnostics.converged = report.verdict != Verdict::Inconclusive;
  return report;
}

}  // namespace

AmplifiedElement embed_corner(const AmplifiedElement& x, std::size_t level) {
  if (level < x.level) throw InvalidInput("embed_corner: target level is smaller than the element's");
  const std::size_t d = x.grid.empty() ? 0 : x.grid.front().size();
  AmplifiedElement out;
  out.level = level;
  out.grid.assign(level * level, CVec(d));
  for (std::size_t i = 0; i < x.level; ++i)
    for (std::size_t j = 0; j < x.level; ++j) out.at(i, j) = x.at(i, j);
  return out;
}

double defect_at(const ConcreteOpSpace& space, const CVec& u, const AmplifiedElement& x, Direction direction) {
  const std::size_t n = x.level;
  const BlockAffineMap stacked = stacked_map(space, u, n, direction);
  const RVec p = to_params(x);
  const double s = stacked.norm(p);
  const double xn = space.norm(x);
  return 1.0 + xn * xn - s * s;
}

DefectProfile row_defect(const ConcreteOpSpace& space, const CVec& u, std::size_t level, const SolverConfig& config,
                         const AmplifiedElement* warm) {
  return search_defect(space, u, level, Direction::Row, config, warm);
}

DefectProfile column_defect(const ConcreteOpSpace& space, const CVec& u, std::size_t level,
                            const SolverConfig& config, const AmplifiedElement* warm) {
  return search_defect(space, u, level, Direction::Column, config, warm);
}

CertificateReport certify_unitary(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                  const SolverConfig& config) {
  return certify_levels("unitary", space, u, max_level, config, true, true);
}

CertificateReport certify_isometry(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                   const SolverConfig& config) {
  return certify_levels("isometry", space, u, max_level, config, false, true);
}

CertificateReport certify_coisometry(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                     const SolverConfig& config) {
  return certify_levels("coisometry", space, u, max_level, config, true, false);
}

}  // namespace opcert
