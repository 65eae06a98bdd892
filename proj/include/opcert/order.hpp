#pragma once
//
// Finitely generated cones in X, norm-order units, and comparison of a cone
// with the positive part of the canonical operator system.
//

#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"
#include "opcert/tro.hpp"

namespace opcert {

inline constexpr double kConeTol = 1e-6;

struct Cone {
  ConcreteOpSpace space;
  std::vector<CVec> generators;

  /// Throws InvalidInput for a zero generator or a coefficient-count mismatch.
  static Cone make(ConcreteOpSpace space, std::vector<CVec> generators);
  Cone without(std::size_t generator) const;
};

struct ConeMembership {
  RVec weights;           ///< nonnegative combination of the generators
  double residual = 0.0;  ///< Frobenius distance from x to that combination
  bool member = false;
  int iterations = 0;
};

/// Nonnegative least squares by accelerated projected gradient.
ConeMembership cone_membership(const Cone& cone, const CVec& x, double tol = kConeTol);

/// u lies in the cone and ||x|| u - x lies in the cone for sampled real combinations of the hermitian basis.
CertificateReport norm_order_unit_check(const Cone& cone, const CVec& u, const std::vector<CVec>& hermitian_basis,
                                        const SolverConfig& config, int samples = 50);

/// Generators are u-positive in the ambient sense, and sampled elements of Delta^u_+ lie in the cone.
CertificateReport cone_equals_delta_plus(const Cone& cone, const CVec& u, const TroClosure& closure,
                                         const SolverConfig& config, int samples = 200);

}  // namespace opcert
