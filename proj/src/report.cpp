#include "opcert/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace opcert {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::Exact: return "exact";
    case Bound::LowerBound: return "lower-bound";
    case Bound::UpperBound: return "upper-bound";
  }
  return "exact";
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::Intrinsic: return "intrinsic";
    case Scope::Exact: return "ambient-exact";
    case Scope::SufficientOnly: return "ambient-sufficient-only";
  }
  return "intrinsic";
}

void SolverDiagnostics::absorb(const SolverDiagnostics& other) {
  starts += other.starts;
  iterations += other.iterations;
  evaluations += other.evaluations;
  fd_fallbacks += other.fd_fallbacks;
  bound_violations += other.bound_violations;
}

double CertificateReport::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw std::out_of_range("report has no metric named " + std::string(name));
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

Verdict classify_infimum(double value, double tol, double fail_threshold, bool converged) {
  if (value <= tol) return Verdict::Pass;
  if (value >= fail_threshold && converged) return Verdict::Fail;
  return Verdict::Inconclusive;
}

Verdict classify_supremum(double value, double tol, double fail_threshold, bool converged) {
  if (value >= fail_threshold) return Verdict::Fail;
  if (value <= tol && converged) return Verdict::Pass;
  return Verdict::Inconclusive;
}

}  // namespace opcert
