#pragma once
//
// u-hermitian and u-positive elements, the operator system Delta^u they span,
// and the operator-system test "the u-hermitians span X".
//

#include <optional>
#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"
#include "opcert/tro.hpp"

namespace opcert {

/// Slack below which a hermitian criterion counts as violated.
inline constexpr double kHermitianSlackTol = 1e-8;

struct HermitianProfile {
  /// Positive t values; the scalar criterion is also evaluated at -t.
  RVec t_grid;
  /// sqrt(t^2 + 1) - ||[[t u, x], [-x, t u]]|| for x scaled into Ball(X).
  RVec matricial_slack;
  /// (1 + t^2 ||x||^2) - ||u + i t x||^2 at +t, then at -t.
  RVec scalar_slack_pos;
  RVec scalar_slack_neg;
  double min_slack = 0.0;
  /// Factor applied to x before the matricial test (1 when ||x|| <= 1).
  double scale = 1.0;
  Verdict verdict = Verdict::Inconclusive;
};

HermitianProfile is_u_hermitian(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                double tol = kHermitianSlackTol);

/// Hermitian and ||(||x|| u - x)|| <= ||x||; for x in Ball(X) the matricial test on u - x is reported as well.
CertificateReport is_u_positive(const ConcreteOpSpace& space, const CVec& u, const CVec& x, const RVec& t_grid,
                                double tol = kHermitianSlackTol);

struct DeltaSpan {
  /// Real-linear basis of the u-hermitians (coefficient vectors).
  std::vector<CVec> hermitian_basis;
  /// Complex basis of their span.
  std::vector<CVec> complex_basis;
  bool ambient_route = false;
  Scope scope = Scope::Intrinsic;
};

/// Ambient route when a closure is supplied and u is unitary in it: solve x* u = u* x exactly.
/// Otherwise real combinations of pairs of basis elements are filtered through is_u_hermitian,
/// which yields a subspace of the true hermitian part.
DeltaSpan delta_span(const ConcreteOpSpace& space, const CVec& u, const TroClosure* closure, const RVec& t_grid);

/// Complex dimension of Delta^u equals dim X.
CertificateReport operator_system_check(const ConcreteOpSpace& space, const CVec& u, const TroClosure* closure,
                                        const RVec& t_grid);

/// Real rank of a family of coefficient vectors viewed in R^{2d}.
std::size_t real_rank(const std::vector<CVec>& vectors, double rel_tol = 1e-8);
/// Complex rank of a family of coefficient vectors.
std::size_t complex_rank(const std::vector<CVec>& vectors, double rel_tol = 1e-8);

}  // namespace opcert
