#pragma once
//
// Function spaces on a finite sample set K, their minimal operator space
// structure (diagonal matrices), and the built-in example catalog.
//

#include <optional>
#include <string>
#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"

namespace opcert {

/// Pointwise tolerance for |g(w)| = 1 and for real-valuedness.
inline constexpr double kUnimodularTol = 1e-9;

/// Tolerance used for sampled circle examples: 10 / m.
inline double sampling_tolerance(std::size_t points) { return 10.0 / static_cast<double>(points); }

struct SampledFunctionSpace {
  std::size_t points = 0;
  std::vector<CVec> basis;  ///< values at the sample points
  std::optional<CVec> unit;

  /// Validates lengths and linear independence (same Gram test as ConcreteOpSpace).
  static SampledFunctionSpace make(std::vector<CVec> basis, std::optional<CVec> unit = std::nullopt);

  std::size_t dim() const { return basis.size(); }
  CVec evaluate(const CVec& coeffs) const;
  /// Sup norm over the samples.
  double norm(const CVec& coeffs) const;
};

/// The functions as diagonal m x m matrices; every matrix level then carries the sup of blockwise norms.
ConcreteOpSpace min_opspace(const SampledFunctionSpace& fspace);

/// sup over |s|^2 + |t|^2 = 1 of ||s f + t g|| equals sqrt(2) for sampled norm-one f
/// (the normalized basis and random_samples seeded combinations). tol <= 0 selects 10 / m.
CertificateReport scalar_unitary_check(const SampledFunctionSpace& fspace, const CVec& g, const SolverConfig& config,
                                       int random_samples = 8, double tol = 0.0);

/// sup over the (s, t) sphere of ||s f + t g||, searched on a (phi, psi) grid with local refinement.
double scalar_pair_sup(const SampledFunctionSpace& fspace, const CVec& f, const CVec& g);

struct GHermitianResult {
  /// Real basis of {x in X : conj(g) x is real at every sample}.
  std::vector<CVec> real_basis;
  std::size_t complex_dim = 0;
  bool function_system = false;
};

/// Exact real-linear solve. Throws PreconditionError unless g is unimodular.
GHermitianResult g_hermitian_solve(const SampledFunctionSpace& fspace, const CVec& g);

/// Report form of g_hermitian_solve.
CertificateReport function_system_check(const SampledFunctionSpace& fspace, const CVec& g);

/// For real unimodular v in a conjugation-closed space: (X, v) is a function system and
/// v conj(x) v = conj(x). Premise violations throw PreconditionError.
CertificateReport selfadjoint_unit_check(const SampledFunctionSpace& fspace, const CVec& v);

struct CatalogEntry {
  std::string name;
  std::string description;
  ConcreteOpSpace space;
  std::optional<SampledFunctionSpace> fspace;
  bool envelope_exact = false;
  /// Additional unitaries of interest, by name (the unit is space.unit()).
  std::vector<std::pair<std::string, CVec>> candidates;
};

/// Canonical catalog names.
const std::vector<std::string>& catalog_names();
/// Builds a catalog entry. points is the sample count per circle for function spaces (ignored otherwise).
/// Throws InvalidInput for unknown names.
CatalogEntry catalog(const std::string& name, std::size_t points = 360);

}  // namespace opcert
