#include "opcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "opcert/errors.hpp"

namespace opcert {

void SolverConfig::validate() const {
  if (starts <= 0 || max_iterations <= 0 || threads <= 0) throw InvalidInput("solver config: counts must be positive");
  if (!(step0 > 0) || !(stationarity_tol > 0) || !(cert_tol > 0) || !(t_large > 0)) {
    throw InvalidInput("solver config: tolerances and steps must be positive");
  }
  if (!(fail_factor >= 10.0)) throw InvalidInput("solver config: fail threshold must be at least 10x the tolerance");
  if (t_grid.empty()) throw InvalidInput("solver config: t grid is empty");
  for (double t : t_grid)
    if (!(t > 0)) throw InvalidInput("solver config: t grid values must be positive");
}

std::uint64_t start_seed(std::uint64_t root, std::uint64_t start_index) {
  // splitmix64 over the combined key
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (start_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// BlockAffineMap
// ---------------------------------------------------------------------------

BlockAffineMap::BlockAffineMap(const ConcreteOpSpace& space, std::size_t block_rows, std::size_t block_cols,
                               std::size_t slots)
    : space_(&space), block_rows_(block_rows), block_cols_(block_cols), slots_(slots),
      cells_(block_rows * block_cols) {
  if (block_rows == 0 || block_cols == 0) throw InvalidInput("BlockAffineMap: empty block grid");
}

void BlockAffineMap::set_constant(std::size_t i, std::size_t j, CMat compact) {
  cells_.at(i * block_cols_ + j).constant = std::move(compact);
}

void BlockAffineMap::set_variable(std::size_t i, std::size_t j, std::size_t slot) {
  if (slot >= slots_) throw InvalidInput("BlockAffineMap: slot index out of range");
  cells_.at(i * block_cols_ + j).slot = static_cast<int>(slot);
}

std::vector<CMat> BlockAffineMap::cell_values(std::span<const double> params) const {
  if (params.size() != dim()) throw InvalidInput("BlockAffineMap: parameter count mismatch");
  const std::size_t d = space_->dim();
  std::vector<CMat> slot_values(slots_);
  for (std::size_t s = 0; s < slots_; ++s) {
    slot_values[s] = space_->embed(ConcreteOpSpace::coeffs_from_real(params.subspan(2 * d * s, 2 * d)));
  }
  std::vector<CMat> out(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const Cell& c = cells_[k];
    if (c.slot >= 0) {
      out[k] = slot_values[c.slot];
      if (!c.constant.empty()) out[k] += c.constant;
    } else if (!c.constant.empty()) {
      out[k] = c.constant;
    } else {
      out[k] = space_->ambient().zero();
    }
  }
  return out;
}

CMat BlockAffineMap::point_matrix(const std::vector<CMat>& cells, std::size_t w) const {
  CMat m(block_rows_, block_cols_);
  for (std::size_t k = 0; k < cells.size(); ++k) m.entries()[k] = cells[k](w, 0);
  return m;
}

CMat BlockAffineMap::assemble(std::span<const double> params) const {
  const auto cells = cell_values(params);
  const Ambient& amb = space_->ambient();
  const std::size_t p = amb.rows;
  const std::size_t q = amb.cols;
  CMat out(block_rows_ * p, block_cols_ * q);
  for (std::size_t bi = 0; bi < block_rows_; ++bi)
    for (std::size_t bj = 0; bj < block_cols_; ++bj) {
      const CMat cell = amb.dense(cells[bi * block_cols_ + bj]);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) out(bi * p + i, bj * q + j) = cell(i, j);
    }
  return out;
}

double BlockAffineMap::norm(std::span<const double> params) const {
  if (!space_->diagonal()) return spectral_norm(assemble(params));
  const auto cells = cell_values(params);
  double best = 0.0;
  for (std::size_t w = 0; w < space_->rows(); ++w) best = std::max(best, spectral_norm(point_matrix(cells, w)));
  return best;
}

double BlockAffineMap::subgradient(std::span<const double> params, std::span<double> grad, bool& used_fd) const {
  if (grad.size() != dim()) throw InvalidInput("BlockAffineMap: gradient buffer has the wrong size");
  used_fd = false;
  const std::size_t d = space_->dim();
  const auto& basis = space_->basis();
  std::fill(grad.begin(), grad.end(), 0.0);

  double sigma = 0.0;
  double gap = 0.0;
  // z(slot, j) = u^H D v for the direction placing basis_j into every cell of the slot.
  std::vector<cplx> z(slots_ * d);

  if (!space_->diagonal()) {
    const SingularTriple top = top_singular_triple(assemble(params));
    sigma = top.sigma;
    gap = top.gap;
    const std::size_t p = space_->rows();
    const std::size_t q = space_->cols();
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (cells_[k].slot < 0) continue;
      const std::size_t bi = k / block_cols_;
      const std::size_t bj = k % block_cols_;
      for (std::size_t j = 0; j < d; ++j) {
        const CMat& b = basis[j];
        cplx acc{};
        for (std::size_t r = 0; r < p; ++r) {
          const cplx ur = std::conj(top.left[bi * p + r]);
          if (ur == cplx{}) continue;
          for (std::size_t c = 0; c < q; ++c) acc += ur * b(r, c) * top.right[bj * q + c];
        }
        z[cells_[k].slot * d + j] += acc;
      }
    }
  } else {
    const auto cells = cell_values(params);
    std::size_t arg = 0;
    double first = -1.0;
    double runner_up = 0.0;
    for (std::size_t w = 0; w < space_->rows(); ++w) {
      const double s = spectral_norm(point_matrix(cells, w));
      if (s > first) {
        runner_up = std::max(runner_up, first);
        first = s;
        arg = w;
      } else {
        runner_up = std::max(runner_up, s);
      }
    }
    const SingularTriple top = top_singular_triple(point_matrix(cells, arg));
    sigma = top.sigma;
    gap = std::min(top.gap, sigma - runner_up);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (cells_[k].slot < 0) continue;
      const std::size_t bi = k / block_cols_;
      const std::size_t bj = k % block_cols_;
      for (std::size_t j = 0; j < d; ++j) {
        z[cells_[k].slot * d + j] += std::conj(top.left[bi]) * basis[j](arg, 0) * top.right[bj];
      }
    }
  }

  if (gap <= kSingularGapTol) {
    used_fd = true;
    const RVec fd = finite_difference_gradient([this](std::span<const double> x) { return norm(x); }, params);
    std::copy(fd.begin(), fd.end(), grad.begin());
    return sigma;
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    grad[2 * k] = z[k].real();
    grad[2 * k + 1] = -z[k].imag();
  }
  return sigma;
}

RVec finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> at, double step) {
  RVec x(at.begin(), at.end());
  RVec g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + step;
    const double up = f(x);
    x[k] = keep - step;
    const double down = f(x);
    x[k] = keep;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Multistart machinery
// ---------------------------------------------------------------------------

namespace {

struct StartOutcome {
  RVec x;
  double value = 0.0;
  SolverDiagnostics diag;
  RVec history;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void check_finite(double v, std::span<const double> x) {
  if (std::isfinite(v)) return;
  std::ostringstream msg;
  msg << "objective returned a non-finite value at iterate [";
  msg.precision(17);
  for (std::size_t k = 0; k < x.size(); ++k) msg << (k ? ", " : "") << x[k];
  msg << "]";
  throw SolverError(msg.str());
}

// Evaluate starts in batches of `threads`. Results are folded in index order and the
// search stops at the first index where `done` holds; later starts of that batch are
// discarded. Together with the lowest-index tie rule this makes the outcome, diagnostics
// included, independent of the thread count.
template <typename Run, typename Better, typename Done>
StartOutcome run_multistart(int count, int threads, Run run, Better better, Done done, SolverDiagnostics& total) {
  StartOutcome best;
  int best_index = -1;
  bool stop = false;
  for (int base = 0; base < count && !stop; base += threads) {
    const int batch = std::min(threads, count - base);
    std::vector<StartOutcome> out(batch);
    if (batch == 1) {
      out[0] = run(base);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(batch);
      for (int b = 0; b < batch; ++b) {
        pool.emplace_back([&, b] {
          try {
            out[b] = run(base + b);
          } catch (...) {
            errors[b] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (int b = 0; b < batch; ++b) {
      total.absorb(out[b].diag);
      total.starts += 1;
      if (best_index < 0 || better(out[b].value, best.value)) {
        best = std::move(out[b]);
        best_index = base + b;
      }
      if (done(best.value)) {
        stop = true;
        break;
      }
    }
  }
  total.best_start = best_index;
  return best;
}

RVec scaled_to(const RVec& x, double factor) {
  RVec y = x;
  for (auto& v : y) v *= factor;
  return y;
}

RVec default_start(std::size_t dim, int index, int skip_origin, std::uint64_t seed, bool in_ball) {
  // index 0 (unless skipped): origin; then coordinate directions over the complex
  // coordinates (real part only); then seeded Gaussian directions.
  RVec x(dim, 0.0);
  int k = index + skip_origin;
  if (k == 0) return x;
  --k;
  const int coords = static_cast<int>(dim / 2);
  if (k < coords) {
    x[2 * k] = 1.0;
    return x;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double n2 = 0.0;
  for (auto& v : x) {
    v = normal(rng);
    n2 += v * v;
  }
  double scale = 1.0 / std::sqrt(std::max(n2, 1e-300));
  if (in_ball) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    scale *= std::pow(uni(rng), 1.0 / static_cast<double>(dim));
  }
  for (auto& v : x) v *= scale;
  return x;
}

}  // namespace

SolverResult minimize_over_ball(const Objective& objective, const NormFn& ball_norm, const SolverConfig& config,
                                const MinimizeOptions& options) {
  config.validate();
  const std::size_t dim = objective.dim;
  const double floor = options.floor;
  const int warm = static_cast<int>(options.warm_starts.size());
  const int count = std::max(config.starts, warm + 1);
  constexpr int kStallWindow = 10;

  auto project = [&](RVec& x) {
    const double n = ball_norm(x);
    if (n > 1.0) x = scaled_to(x, 1.0 / n);
  };

  auto run = [&](int index) {
    StartOutcome o;
    RVec x = index < warm ? options.warm_starts[index]
                          : default_start(dim, index - warm, 0, start_seed(config.seed, index), true);
    if (x.size() != dim) throw InvalidInput("minimize_over_ball: warm start has the wrong dimension");
    project(x);
    RVec g(dim);
    bool fd = false;
    double f = objective.subgradient(x, g, fd);
    check_finite(f, x);
    o.diag.evaluations += 1;
    o.diag.fd_fallbacks += fd ? 1 : 0;
    double best = f;
    RVec xbest = x;
    double delta = std::max(f - floor, 0.0);
    int stall = 0;
    bool converged = f <= floor;
    RVec trial(dim);
    for (int k = 1; k <= config.max_iterations && !converged; ++k) {
      o.diag.iterations += 1;
      const double gn2 = dot(g, g);
      if (gn2 <= 1e-300) {
        converged = true;  // zero subgradient of a convex function: global minimum
        break;
      }
      const double level = std::max(floor, best - delta);
      const double step = std::max(f - level, 0.0) / gn2;
      for (std::size_t i = 0; i < dim; ++i) trial[i] = x[i] - step * g[i];
      project(trial);
      x = trial;
      f = objective.subgradient(x, g, fd);
      check_finite(f, x);
      o.diag.evaluations += 1;
      o.diag.fd_fallbacks += fd ? 1 : 0;
      if (f <= best - 0.5 * delta) {
        stall = 0;
      } else if (++stall >= kStallWindow) {
        delta *= 0.5;
        stall = 0;
        x = xbest;
        f = objective.subgradient(x, g, fd);
        o.diag.evaluations += 1;
      }
      if (f < best) {
        best = f;
        xbest = x;
      }
      o.history.push_back(best);
      if (best <= floor || delta <= config.stationarity_tol * std::max(1.0, std::abs(best))) converged = true;
    }
    o.x = std::move(xbest);
    o.value = best;
    o.diag.converged = converged;
    return o;
  };

  SolverResult result;
  StartOutcome best = run_multistart(
      count, config.threads, run, [](double a, double b) { return a < b; },
      [stop = std::max(floor, options.stop_below)](double v) { return v <= stop; }, result.diagnostics);
  result.argbest = std::move(best.x);
  result.value = best.value;
  result.history = std::move(best.history);
  result.diagnostics.converged = best.diag.converged;
  return result;
}

SolverResult maximize_over_sphere(const Objective& objective, const NormFn& sphere_norm, const SolverConfig& config,
                                  const SphereOptions& options) {
  config.validate();
  const std::size_t dim = objective.dim;
  const int warm = static_cast<int>(options.warm_starts.size());
  const int count = std::max(config.starts, warm + 1);
  constexpr int kWindow = 25;

  auto normalize = [&](RVec& x) {
    const double n = sphere_norm(x);
    if (!(n > 0)) throw SolverError("maximize_over_sphere: iterate collapsed to zero");
    x = scaled_to(x, 1.0 / n);
  };

  auto run = [&](int index) {
    StartOutcome o;
    RVec x = index < warm ? options.warm_starts[index]
                          : default_start(dim, index - warm, 1, start_seed(config.seed, index), false);
    if (x.size() != dim) throw InvalidInput("maximize_over_sphere: warm start has the wrong dimension");
    normalize(x);
    RVec g(dim);
    bool fd = false;
    double f = objective.subgradient(x, g, fd);
    check_finite(f, x);
    o.diag.evaluations += 1;
    o.diag.fd_fallbacks += fd ? 1 : 0;
    double best = f;
    RVec xbest = x;
    bool converged = false;
    RVec trial(dim);
    for (int k = 1; k <= config.max_iterations; ++k) {
      o.diag.iterations += 1;
      const double gn = std::sqrt(dot(g, g));
      if (gn <= 1e-300) {
        converged = true;
        break;
      }
      const double step = config.step0 / std::sqrt(static_cast<double>(k));
      for (std::size_t i = 0; i < dim; ++i) trial[i] = x[i] + step * g[i] / gn;
      normalize(trial);
      x = trial;
      f = objective.subgradient(x, g, fd);
      check_finite(f, x);
      o.diag.evaluations += 1;
      o.diag.fd_fallbacks += fd ? 1 : 0;
      if (f > best) {
        best = f;
        xbest = x;
      }
      o.history.push_back(best);
      if (k >= kWindow && best - o.history[k - kWindow] <= config.stationarity_tol) {
        converged = true;
        break;
      }
    }
    o.x = std::move(xbest);
    o.value = best;
    o.diag.converged = converged;
    return o;
  };

  SolverResult result;
  StartOutcome best = run_multistart(
      count, config.threads, run, [](double a, double b) { return a > b; }, [](double) { return false; },
      result.diagnostics);
  result.argbest = std::move(best.x);
  result.value = best.value;
  result.history = std::move(best.history);
  result.diagnostics.converged = best.diag.converged;
  return result;
}

}  // namespace opcert
