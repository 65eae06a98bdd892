#pragma once
//
// Space files and report files.
//
// Both are JSON trees. Complex numbers are always [re, im] pairs and every
// float is written with 17 significant digits, so emit -> parse -> emit is
// byte-identical.
//

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opcert/funcspace.hpp"
#include "opcert/opspace.hpp"
#include "opcert/report.hpp"
#include "opcert/solver.hpp"

namespace opcert {

inline constexpr const char* kSpaceFormat = "opcert-space/1";
inline constexpr const char* kReportFormat = "opcert-report/1";

const char* tool_version();

enum class SpaceKind { Matrix, Function };

/// Partial solver configuration read from a space file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<int> max_iterations;
  std::optional<double> step0;
  std::optional<double> stationarity_tol;
  std::optional<std::vector<double>> t_grid;
  std::optional<double> cert_tol;
  std::optional<double> fail_factor;
  std::optional<double> t_large;
  std::optional<int> threads;

  bool empty() const;
  /// Copies the present fields onto config.
  void apply(SolverConfig& config) const;
};

struct SpaceFile {
  std::string name;  ///< optional, empty when absent
  SpaceKind kind = SpaceKind::Matrix;
  std::size_t rows = 0;    ///< matrix spaces
  std::size_t cols = 0;
  std::size_t points = 0;  ///< function spaces
  /// Matrix spaces: full rows x cols matrices. Function spaces: points x 1 value columns.
  std::vector<CMat> basis;
  std::optional<CVec> unit;
  std::vector<CVec> cone;
  std::optional<bool> envelope_exact;
  ConfigOverrides config;

  std::size_t dim() const { return basis.size(); }
};

/// Parses and validates a space file. Throws InvalidInput naming the offending field
/// (or the byte offset of a syntax error).
SpaceFile parse_space_file(const std::string& text);
SpaceFile load_space_file(const std::string& path);
std::string emit_space_file(const SpaceFile& file);

SpaceFile space_file_from_catalog(const CatalogEntry& entry);

ConcreteOpSpace build_space(const SpaceFile& file);
/// Present only for function spaces.
std::optional<SampledFunctionSpace> build_function_space(const SpaceFile& file);
/// Explicit flag, else true for function spaces, else whether the generated TRO equals X.
bool resolve_envelope_exact(const SpaceFile& file, std::size_t generated_tro_dim);

/// Parses "re:im,re,..." (a bare number is real). Throws InvalidInput.
CVec parse_coeffs(const std::string& text);
/// Parses "a,b,c".
std::vector<double> parse_reals(const std::string& text);

/// Top-level report file.
struct ReportFile {
  std::vector<std::string> command;
  std::uint64_t seed = 0;
  std::string timestamp;  ///< excluded from determinism comparisons
  int exit_code = 0;
  CertificateReport report;
  /// Extra named vectors (recovered elements, ambient truths).
  std::vector<std::pair<std::string, CVec>> vectors;
};

std::string report_to_json(const ReportFile& file);
/// The same tree without the timestamp, for comparisons.
std::string report_to_json_canonical(const ReportFile& file);
/// Human-readable summary.
std::string report_to_text(const ReportFile& file);

/// Exit code for a verdict: 0 pass, 1 fail, 2 inconclusive.
int exit_code_for(Verdict v);

}  // namespace opcert
