#pragma once
//
// Intrinsic certificates for unitaries, isometries and coisometries. Only the
// matrix norms of X are used: u is a coisometry when ||[u_n x]||^2 = 1 + ||x||^2
// for every norm-one x in M_n(X), and an isometry for the column version.
//

#include <vector>

#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"

namespace opcert {

enum class Direction { Row, Column };
std::string_view to_string(Direction d);

struct DefectProfile {
  std::size_t level = 1;
  Direction direction = Direction::Row;
  /// Largest (1 + ||x||^2) - ||[u_n x]||^2 found; a lower bound on the true supremum.
  double worst_defect = 0.0;
  AmplifiedElement witness;
  SolverDiagnostics diagnostics;
  Verdict verdict = Verdict::Inconclusive;
};

/// Value of the defect at one amplified element (any norm; not normalized).
double defect_at(const ConcreteOpSpace& space, const CVec& u, const AmplifiedElement& x, Direction direction);

/// Maximizes the defect over the unit sphere of M_n(X). A warm start (typically the
/// previous level's witness) is tried first when given.
DefectProfile row_defect(const ConcreteOpSpace& space, const CVec& u, std::size_t level, const SolverConfig& config,
                         const AmplifiedElement* warm = nullptr);
DefectProfile column_defect(const ConcreteOpSpace& space, const CVec& u, std::size_t level,
                            const SolverConfig& config, const AmplifiedElement* warm = nullptr);

/// Row and column defects at every level 1..max_level.
CertificateReport certify_unitary(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                  const SolverConfig& config);
/// Column defects only.
CertificateReport certify_isometry(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                   const SolverConfig& config);
/// Row defects only.
CertificateReport certify_coisometry(const ConcreteOpSpace& space, const CVec& u, std::size_t max_level,
                                     const SolverConfig& config);

/// The n x n element with the level-(n-1) element in the top-left corner and zeros elsewhere.
AmplifiedElement embed_corner(const AmplifiedElement& x, std::size_t level);

}  // namespace opcert
