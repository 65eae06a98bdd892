#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opcert/matcore.hpp"

namespace opcert {

enum class Verdict { Pass, Fail, Inconclusive };

/// Which side of the reported margin the computation actually certifies.
enum class Bound {
  Exact,       ///< closed-form or exact linear algebra
  LowerBound,  ///< a witness was found; the true supremum is at least the margin
  UpperBound,  ///< a feasible point was found; the true infimum is at most the margin
};

/// How far an ambient verdict speaks for the abstract space.
enum class Scope {
  Intrinsic,       ///< computed from the matrix norms of X alone
  Exact,           ///< ambient oracle on a closure known to be the ternary envelope
  SufficientOnly,  ///< ambient oracle on a generated TRO that may exceed the envelope
};

std::string_view to_string(Verdict v);
std::string_view to_string(Bound b);
std::string_view to_string(Scope s);

/// Short decimal form (%g) for labels such as metric names.
std::string short_number(double v);

struct SolverDiagnostics {
  int starts = 0;
  long iterations = 0;
  long evaluations = 0;
  long fd_fallbacks = 0;
  int best_start = -1;
  bool converged = false;
  /// Iterates that violated 1 <= ||[u_n x]||^2 <= 1 + ||x||^2 (defect searches only).
  long bound_violations = 0;

  void absorb(const SolverDiagnostics& other);
};

struct CertificateReport {
  std::string check;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;
  Bound bound = Bound::Exact;
  Scope scope = Scope::Intrinsic;
  CVec witness;
  SolverDiagnostics diagnostics;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::vector<CertificateReport> parts;

  bool passed() const { return verdict == Verdict::Pass; }
  /// Value of a named metric; throws std::out_of_range when absent.
  double metric(std::string_view name) const;
};

/// Fail dominates, then inconclusive, then pass.
Verdict combine(Verdict a, Verdict b);

/// Three-band reading of a solver value that upper-bounds an infimum.
Verdict classify_infimum(double value, double tol, double fail_threshold, bool converged);
/// Three-band reading of a solver value that lower-bounds a supremum.
Verdict classify_supremum(double value, double tol, double fail_threshold, bool converged);

}  // namespace opcert
