#pragma once
//
// Operator-system detection from norms alone: (X, u) is a system exactly when
// every x in Ball(X) has a partner y in Ball(X) with
//   || [[t u, x], [y, t u]] || <= sqrt(t^2 + 1)   for all real t,
// and then -y approaches the involution of x as t grows.
//

#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"
#include "opcert/tro.hpp"

namespace opcert {

/// Satisfiability threshold for the single t = 1 constraint in the insufficiency probe.
inline constexpr double kT1Tolerance = 1e-3;

struct PartnerSearchResult {
  CVec x;
  CVec y;
  RVec t_grid;
  /// (||block(t)|| - sqrt(t^2 + 1))_+ at the returned y, per t.
  RVec residuals;
  /// max of residuals; an upper bound on the infimum over Ball(X).
  double value = 0.0;
  RVec history;
  SolverDiagnostics diagnostics;
  Verdict verdict = Verdict::Inconclusive;
};

/// max_t (||[[t u, x], [y, t u]]|| - sqrt(t^2 + 1))_+ at a given y (the convex objective minimized by find_partner).
double partner_objective(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const CVec& y,
                         const RVec& t_grid);

PartnerSearchResult find_partner(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                 const SolverConfig& config);

struct DetectOptions {
  /// Random norm-one elements searched in addition to the normalized basis.
  int ball_samples = 4;
  /// Optional ambient cross-check through the u-hermitian span.
  const TroClosure* closure = nullptr;
};

/// Partner searches over the normalized basis and sampled elements; the witness is the hardest x.
CertificateReport detect_operator_system(const ConcreteOpSpace& space, const CVec& u, const SolverConfig& config,
                                         const DetectOptions& options = {});

struct InvolutionRecovery {
  CVec coeffs;         ///< -y, the recovered involution of x
  double residual = 0.0;
  /// 1/t + 1/t^2 + solver tolerance.
  double bound = 0.0;
  double t = 0.0;
  SolverDiagnostics diagnostics;
};

/// -y from a partner search at the single value t. Throws PreconditionError when no partner is found.
InvolutionRecovery recover_involution(const ConcreteOpSpace& space, const CVec& u, const CVec& x, double t,
                                      const SolverConfig& config);

/// Compares the t = 1 constraint alone with the full grid. Passes when the two disagree
/// (t = 1 satisfiable within kT1Tolerance while the full grid fails).
CertificateReport t1_insufficiency_probe(const ConcreteOpSpace& space, const CVec& u, const CVec& x,
                                         const SolverConfig& config);

/// 1/t + 1/t^2.
inline double recovery_bound(double t) { return 1.0 / t + 1.0 / (t * t); }

}  // namespace opcert
