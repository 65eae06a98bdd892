#pragma once
//
// The ternary ring of operators generated by a space inside its ambient
// matrices, and the exact ambient oracles computed from it.
//
// The generated TRO can be strictly larger than the ternary envelope of X.
// Verdicts are therefore tagged with Scope::Exact only when the caller states
// that the closure is known to be the envelope.
//

#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"

namespace opcert {

/// Absolute tolerance for the ambient identities checked here (unitarity, centrality, closure).
inline constexpr double kAmbientTol = 1e-8;

struct TroClosure {
  ConcreteOpSpace space;
  /// Frobenius-orthonormal bases, compact storage.
  std::vector<CMat> z_basis;
  std::vector<CMat> zz_star_basis;
  std::vector<CMat> z_star_z_basis;
  bool envelope_exact = false;

  const Ambient& ambient() const { return space.ambient(); }
  Scope scope() const { return envelope_exact ? Scope::Exact : Scope::SufficientOnly; }
  /// Frobenius distance from a compact ambient matrix to span(z_basis).
  double z_residual(const CMat& compact) const;
};

/// Closes the span under a b* c until the dimension stabilizes. Diagonal spaces use
/// the partition of the sample set by the values of f_i conj(f_j); see generate_tro_generic.
TroClosure generate_tro(const ConcreteOpSpace& space, bool envelope_exact = false);
/// The iterative algorithm for every layout (used directly as a cross-check on diagonal spaces).
TroClosure generate_tro_generic(const ConcreteOpSpace& space, bool envelope_exact = false);

/// v v* z = z and z v* v = z over the closure. Parts hold the coisometry and isometry halves.
CertificateReport ambient_unitary_check(const TroClosure& closure, const CVec& v);

/// u x* u as a compact ambient matrix. Throws PreconditionError unless u is unitary in the closure.
CMat involution(const TroClosure& closure, const CVec& u, const CVec& x);

/// u X* u inside X, basis element by basis element.
CertificateReport ambient_system_check(const TroClosure& closure, const CVec& u);

/// u* v is selfadjoint and central in span(Z* Z).
CertificateReport same_involution_check(const TroClosure& closure, const CVec& u, const CVec& v);

/// x -> v u* x maps X onto X.
CertificateReport transfer_check(const TroClosure& closure, const CVec& u, const CVec& v);

/// Appends m to an orthonormal family when its residual exceeds rel_tol * ||m||; returns whether it was added.
bool extend_orthonormal(std::vector<CMat>& family, const CMat& m, double rel_tol = 1e-9);

}  // namespace opcert
