#pragma once
//
// Optimization engine shared by the certificates: convex minimization over
// Ball(X), ascent over the unit sphere of M_n(X), and subgradients of
// spectral norms of block matrices whose cells are affine in the coefficients.
//

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opcert/matcore.hpp"
#include "opcert/opspace.hpp"
#include "opcert/report.hpp"

namespace opcert {

struct SolverConfig {
  std::uint64_t seed = 20080513;
  int starts = 32;
  int max_iterations = 500;
  double step0 = 0.1;
  double stationarity_tol = 1e-8;
  std::vector<double> t_grid = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  double cert_tol = 1e-4;
  double fail_factor = 10.0;
  double t_large = 100.0;
  int threads = 1;

  double fail_threshold() const { return fail_factor * cert_tol; }
  /// Throws InvalidInput unless every field is positive and fail_factor >= 10.
  void validate() const;
};

/// Singular gap below which the analytic subgradient is replaced by finite differences.
inline constexpr double kSingularGapTol = 1e-8;
inline constexpr double kFiniteDifferenceStep = 1e-6;

/// A block matrix [C_ij] of ambient-shaped cells. Each cell is a fixed matrix
/// plus, optionally, the embedding of one variable element ("slot") of X.
/// Real parameters are laid out slot-major as [re, im] pairs of coefficients.
class BlockAffineMap {
 public:
  BlockAffineMap(const ConcreteOpSpace& space, std::size_t block_rows, std::size_t block_cols,
                 std::size_t slots);

  void set_constant(std::size_t i, std::size_t j, CMat compact);
  void set_variable(std::size_t i, std::size_t j, std::size_t slot);

  std::size_t dim() const { return 2 * slots_ * space_->dim(); }
  std::size_t slots() const { return slots_; }

  /// The full block matrix at the given parameters.
  CMat assemble(std::span<const double> params) const;
  double norm(std::span<const double> params) const;
  /// Norm and a subgradient with respect to the real parameters. Sets used_fd
  /// when the top singular value was (nearly) repeated and finite differences were used.
  double subgradient(std::span<const double> params, std::span<double> grad, bool& used_fd) const;

 private:
  struct Cell {
    CMat constant;  // empty when absent
    int slot = -1;
  };
  std::vector<CMat> cell_values(std::span<const double> params) const;
  CMat point_matrix(const std::vector<CMat>& cells, std::size_t w) const;

  const ConcreteOpSpace* space_;
  std::size_t block_rows_;
  std::size_t block_cols_;
  std::size_t slots_;
  std::vector<Cell> cells_;
};

/// An objective over real parameter vectors.
struct Objective {
  std::size_t dim = 0;
  std::function<double(std::span<const double>)> value;
  /// Fills grad; sets the flag when a finite-difference fallback was used.
  std::function<double(std::span<const double>, std::span<double>, bool&)> subgradient;
};

/// Norm that defines the ball or sphere the parameters live on.
using NormFn = std::function<double(std::span<const double>)>;

struct SolverResult {
  RVec argbest;
  double value = 0.0;
  SolverDiagnostics diagnostics;
  /// Best value after each iteration of the winning start.
  RVec history;
};

struct MinimizeOptions {
  /// Known lower bound of the objective; reaching it ends the search.
  double floor = 0.0;
  /// Remaining starts are skipped once a start reaches this value (defaults to the floor).
  double stop_below = 0.0;
  /// Starting points tried before the default ones (origin, coordinate directions, random).
  std::vector<RVec> warm_starts;
};

struct SphereOptions {
  std::vector<RVec> warm_starts;
};

/// Convex minimization over {x : ball_norm(x) <= 1} by projected subgradient
/// steps with a Polyak level target; projection rescales onto the ball. The
/// value is attained at argbest and therefore upper-bounds the infimum.
SolverResult minimize_over_ball(const Objective& objective, const NormFn& ball_norm, const SolverConfig& config,
                                const MinimizeOptions& options = {});

/// Multistart ascent over {x : sphere_norm(x) = 1} with retraction by
/// normalization and steps step0 / sqrt(k). The value is attained at argbest
/// and therefore lower-bounds the supremum.
SolverResult maximize_over_sphere(const Objective& objective, const NormFn& sphere_norm, const SolverConfig& config,
                                  const SphereOptions& options = {});

/// Central finite-difference gradient of f.
RVec finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> at, double step = kFiniteDifferenceStep);

/// Deterministic per-start generator seed derived from the root seed.
std::uint64_t start_seed(std::uint64_t root, std::uint64_t start_index);

}  // namespace opcert
