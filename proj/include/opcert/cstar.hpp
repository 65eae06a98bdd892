#pragma once
//
// C*-algebra detection and reconstruction of a forgotten product.
//
// For unitaries u, v and y in Ball(X), the z minimizing ||[[t u, y], [z, t v]]||
// satisfies -z ~ v y* u, the product of v with the involution of y in the
// u-unitalization (a o b = a u* b). Products of basis elements are assembled
// from these by linearity over a spanning family of unitaries.
//

#include <optional>
#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"
#include "opcert/tro.hpp"

namespace opcert {

/// Which entry of the block is optimized: the lower-left z (-z ~ v y* u, needs v a coisometry)
/// or the upper-right y given z (-y ~ u z* v, needs u an isometry).
enum class ProductSide { Left, Right };

struct ProductRecovery {
  CVec coeffs;  ///< -z (Left) or -y (Right)
  /// ||block|| minus the norm of the fixed row (Left) or column (Right); 0 when the product lies in X.
  double excess = 0.0;
  double t = 0.0;
  /// 1/t + 1/t^2 + solver tolerance.
  double bound = 0.0;
  Verdict verdict = Verdict::Inconclusive;  ///< Fail means the product escapes X
  SolverDiagnostics diagnostics;
};

/// Left: given v and y in Ball(X), minimize over z. Right: given v and z in Ball(X), minimize over y.
ProductRecovery recover_product(const ConcreteOpSpace& space, const CVec& u, const CVec& v, const CVec& fixed,
                                double t, const SolverConfig& config, ProductSide side = ProductSide::Left);

struct UnitaryPair {
  CVec v1;
  CVec v2;
  double residual1 = 0.0;  ///< membership residuals of the ambient constructions
  double residual2 = 0.0;
  bool members = false;
  bool unitary = false;
};

/// v1 = u (a + i sqrt(u*u - a^2)) with a = u* x, and v2 = 2x - v1. Throws PreconditionError
/// when x is not u-hermitian, ||x|| > 1, or u is not unitary in the closure.
UnitaryPair hermitian_to_unitaries(const TroClosure& closure, const CVec& u, const CVec& x);

struct UnitarySpan {
  /// Unitaries of X collected from u and the hermitian basis.
  std::vector<CVec> unitaries;
  /// A complex-independent subfamily of the collection.
  std::vector<CVec> independent;
};
UnitarySpan collect_unitaries(const TroClosure& closure, const CVec& u);

/// The collected unitaries span X.
CertificateReport unitary_span_check(const TroClosure& closure, const CVec& u);

/// Reconstructed bilinear product on coefficient vectors.
struct ProductTable {
  std::size_t dim = 0;
  /// entries[i * dim + j] are the coefficients of b_i o b_j.
  std::vector<CVec> entries;
  /// Excess of each underlying recovery (unitary k, basis j), row-major.
  RVec recovery_excess;
  /// Recovered involution of each basis element.
  std::vector<CVec> involution;

  CVec multiply(const CVec& a, const CVec& b) const;
  CVec adjoint(const CVec& a) const;
};

struct CStarOptions {
  /// t used for the product table and the involution it relies on.
  double table_t = 1e4;
  /// Random samples for the associativity and C*-identity validation.
  int validation_samples = 20;
  const TroClosure* closure = nullptr;
};

struct CStarResult {
  CertificateReport report;
  std::optional<ProductTable> table;
};

/// System detection, unitary spanning, and closure of the recovered products in X.
/// On a pass the product table is assembled and validated.
CStarResult detect_cstar(const ConcreteOpSpace& space, const CVec& u, const SolverConfig& config,
                         const CStarOptions& options = {});

/// Coefficients c with sum_k c_k family_k = target in the least-squares sense.
CVec solve_in_span(const ConcreteOpSpace& space, const std::vector<CVec>& family, const CVec& target);

}  // namespace opcert
