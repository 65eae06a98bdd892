#include "opcert/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "opcert/errors.hpp"

#ifndef OPCERT_VERSION
#define OPCERT_VERSION "0.0.0"
#endif

namespace opcert {

using Json = nlohmann::ordered_json;

const char* tool_version() { return OPCERT_VERSION; }

namespace {

// ---------------------------------------------------------------- writing

std::string format_double(double v) {
  if (!std::isfinite(v)) throw InvalidInput("cannot serialize a non-finite number");
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

bool is_flat_array(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!is_scalar(e)) return false;
  return true;
}

// Arrays whose elements are flat (e.g. a list of [re, im] pairs) fit on one line.
bool is_compact(const Json& j) {
  if (is_flat_array(j)) return true;
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!is_flat_array(e)) return false;
  return true;
}

void write(std::ostringstream& out, const Json& j, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
    case Json::value_t::null:
      out << "null";
      return;
    case Json::value_t::boolean:
      out << (j.get<bool>() ? "true" : "false");
      return;
    case Json::value_t::number_integer:
      out << j.get<std::int64_t>();
      return;
    case Json::value_t::number_unsigned:
      out << j.get<std::uint64_t>();
      return;
    case Json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    case Json::value_t::string:
      out << Json(j.get<std::string>()).dump();
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      if (is_compact(j)) {
        out << '[';
        bool first = true;
        for (const auto& e : j) {
          if (!first) out << ", ";
          first = false;
          write(out, e, depth + 1);
        }
        out << ']';
        return;
      }
      out << "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << ",\n";
        first = false;
        out << pad;
        write(out, e, depth + 1);
      }
      out << '\n' << close << ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(k).dump() << ": ";
        write(out, v, depth + 1);
      }
      out << '\n' << close << '}';
      return;
    }
    default:
      throw InvalidInput("unsupported JSON value");
  }
}

std::string dump(const Json& j) {
  std::ostringstream out;
  write(out, j, 0);
  out << '\n';
  return out.str();
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json coeffs_json(const CVec& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(complex_json(z));
  return a;
}

// ---------------------------------------------------------------- reading

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw InvalidInput("space file: field '" + path + "': " + what);
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "number is not finite");
  return v;
}

std::size_t positive_size_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) field_error(path, "expected a positive integer");
  return static_cast<std::size_t>(j.get<std::int64_t>());
}

cplx complex_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) field_error(path, "expected an [re, im] pair");
  return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

CVec coeffs_at(const Json& j, const std::string& path, std::size_t expected) {
  if (!j.is_array()) field_error(path, "expected an array of [re, im] pairs");
  if (j.size() != expected) {
    field_error(path, "expected " + std::to_string(expected) + " entries, found " + std::to_string(j.size()));
  }
  CVec out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_at(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

ConfigOverrides config_at(const Json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  ConfigOverrides c;
  for (const auto& [key, v] : j.items()) {
    const std::string p = path + "." + key;
    auto integer = [&]() {
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) field_error(p, "expected a positive integer");
      return static_cast<int>(v.get<std::int64_t>());
    };
    if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        field_error(p, "expected a nonnegative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (key == "starts") {
      c.starts = integer();
    } else if (key == "max_iterations") {
      c.max_iterations = integer();
    } else if (key == "threads") {
      c.threads = integer();
    } else if (key == "step0") {
      c.step0 = number_at(v, p);
    } else if (key == "stationarity_tol") {
      c.stationarity_tol = number_at(v, p);
    } else if (key == "cert_tol") {
      c.cert_tol = number_at(v, p);
    } else if (key == "fail_factor") {
      c.fail_factor = number_at(v, p);
    } else if (key == "t_large") {
      c.t_large = number_at(v, p);
    } else if (key == "t_grid") {
      if (!v.is_array() || v.empty()) field_error(p, "expected a nonempty array of numbers");
      std::vector<double> grid;
      for (std::size_t k = 0; k < v.size(); ++k) grid.push_back(number_at(v[k], p + "[" + std::to_string(k) + "]"));
      c.t_grid = std::move(grid);
    } else {
      field_error(p, "unknown configuration key");
    }
  }
  SolverConfig probe;
  c.apply(probe);
  try {
    probe.validate();
  } catch (const InvalidInput& e) {
    field_error(path, e.what());
  }
  return c;
}

Json config_json(const ConfigOverrides& c) {
  Json j = Json::object();
  if (c.seed) j["seed"] = *c.seed;
  if (c.starts) j["starts"] = *c.starts;
  if (c.max_iterations) j["max_iterations"] = *c.max_iterations;
  if (c.step0) j["step0"] = *c.step0;
  if (c.stationarity_tol) j["stationarity_tol"] = *c.stationarity_tol;
  if (c.t_grid) j["t_grid"] = *c.t_grid;
  if (c.cert_tol) j["cert_tol"] = *c.cert_tol;
  if (c.fail_factor) j["fail_factor"] = *c.fail_factor;
  if (c.t_large) j["t_large"] = *c.t_large;
  if (c.threads) j["threads"] = *c.threads;
  return j;
}

Json diagnostics_json(const SolverDiagnostics& d) {
  return Json{{"starts", d.starts},
              {"iterations", d.iterations},
              {"evaluations", d.evaluations},
              {"fd_fallbacks", d.fd_fallbacks},
              {"best_start", d.best_start},
              {"converged", d.converged},
              {"bound_violations", d.bound_violations}};
}

Json report_json(const CertificateReport& r) {
  Json j;
  j["check"] = r.check;
  j["verdict"] = std::string(to_string(r.verdict));
  j["margin"] = r.margin;
  j["bound"] = std::string(to_string(r.bound));
  j["scope"] = std::string(to_string(r.scope));
  j["witness"] = coeffs_json(r.witness);
  j["diagnostics"] = diagnostics_json(r.diagnostics);
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  j["notes"] = r.notes;
  Json parts = Json::array();
  for (const auto& p : r.parts) parts.push_back(report_json(p));
  j["parts"] = std::move(parts);
  return j;
}

Json report_file_json(const ReportFile& f, bool with_timestamp) {
  Json j;
  j["format"] = kReportFormat;
  j["tool"] = Json{{"name", "opcert"}, {"version", tool_version()}};
  j["command"] = f.command;
  j["seed"] = f.seed;
  if (with_timestamp) j["timestamp"] = f.timestamp;
  j["exit_code"] = f.exit_code;
  Json vectors = Json::object();
  for (const auto& [k, v] : f.vectors) vectors[k] = coeffs_json(v);
  j["vectors"] = std::move(vectors);
  j["report"] = report_json(f.report);
  return j;
}

void text_report(std::ostringstream& out, const CertificateReport& r, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  out << pad << r.check << ": " << to_string(r.verdict) << "  margin " << format_double(r.margin) << " ("
      << to_string(r.bound) << ", " << to_string(r.scope) << ")\n";
  for (const auto& [k, v] : r.metrics) out << pad << "  " << k << " = " << format_double(v) << '\n';
  for (const auto& n : r.notes) out << pad << "  note: " << n << '\n';
  for (const auto& p : r.parts) text_report(out, p, depth + 1);
}

std::string coeffs_text(const CVec& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += format_double(v[k].real());
    if (v[k].imag() != 0.0) s += (v[k].imag() < 0 ? " - " : " + ") + format_double(std::abs(v[k].imag())) + "i";
  }
  return "[" + s + "]";
}

}  // namespace

// ---------------------------------------------------------------- config

bool ConfigOverrides::empty() const {
  return !seed && !starts && !max_iterations && !step0 && !stationarity_tol && !t_grid && !cert_tol &&
         !fail_factor && !t_large && !threads;
}

void ConfigOverrides::apply(SolverConfig& c) const {
  if (seed) c.seed = *seed;
  if (starts) c.starts = *starts;
  if (max_iterations) c.max_iterations = *max_iterations;
  if (step0) c.step0 = *step0;
  if (stationarity_tol) c.stationarity_tol = *stationarity_tol;
  if (t_grid) c.t_grid = *t_grid;
  if (cert_tol) c.cert_tol = *cert_tol;
  if (fail_factor) c.fail_factor = *fail_factor;
  if (t_large) c.t_large = *t_large;
  if (threads) c.threads = *threads;
}

// ---------------------------------------------------------------- space files

SpaceFile parse_space_file(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("space file: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput("space file: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    static const char* known[] = {"format", "name",  "kind", "rows",           "cols",  "points",
                                  "basis",  "unit", "cone", "envelope_exact", "config"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) field_error(key, "unknown field");
    (void)v;
  }
  if (!j.contains("format") || j["format"] != kSpaceFormat) {
    field_error("format", std::string("expected \"") + kSpaceFormat + "\"");
  }
  SpaceFile f;
  if (j.contains("name")) {
    if (!j["name"].is_string()) field_error("name", "expected a string");
    f.name = j["name"].get<std::string>();
  }
  if (!j.contains("kind") || !j["kind"].is_string()) field_error("kind", "expected \"matrix\" or \"function\"");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("basis") || !j["basis"].is_array() || j["basis"].empty()) {
    field_error("basis", "expected a nonempty array");
  }
  const Json& basis = j["basis"];
  if (kind == "matrix") {
    f.kind = SpaceKind::Matrix;
    if (!j.contains("rows")) field_error("rows", "missing");
    if (!j.contains("cols")) field_error("cols", "missing");
    if (j.contains("points")) field_error("points", "not allowed for matrix spaces");
    f.rows = positive_size_at(j["rows"], "rows");
    f.cols = positive_size_at(j["cols"], "cols");
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const std::string p = "basis[" + std::to_string(b) + "]";
      const Json& m = basis[b];
      if (!m.is_array() || m.size() != f.rows) field_error(p, "expected " + std::to_string(f.rows) + " rows");
      CMat mat(f.rows, f.cols);
      for (std::size_t r = 0; r < f.rows; ++r) {
        const CVec row = coeffs_at(m[r], p + "[" + std::to_string(r) + "]", f.cols);
        for (std::size_t c = 0; c < f.cols; ++c) mat(r, c) = row[c];
      }
      f.basis.push_back(std::move(mat));
    }
  } else if (kind == "function") {
    f.kind = SpaceKind::Function;
    if (!j.contains("points")) field_error("points", "missing");
    if (j.contains("rows") || j.contains("cols")) field_error("rows", "not allowed for function spaces");
    f.points = positive_size_at(j["points"], "points");
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const CVec values = coeffs_at(basis[b], "basis[" + std::to_string(b) + "]", f.points);
      f.basis.emplace_back(f.points, 1, values);
    }
  } else {
    field_error("kind", "expected \"matrix\" or \"function\"");
  }
  if (j.contains("unit")) f.unit = coeffs_at(j["unit"], "unit", f.dim());
  if (j.contains("cone")) {
    const Json& cone = j["cone"];
    if (!cone.is_array()) field_error("cone", "expected an array of coefficient vectors");
    for (std::size_t k = 0; k < cone.size(); ++k) {
      f.cone.push_back(coeffs_at(cone[k], "cone[" + std::to_string(k) + "]", f.dim()));
    }
  }
  if (j.contains("envelope_exact")) {
    if (!j["envelope_exact"].is_boolean()) field_error("envelope_exact", "expected a boolean");
    f.envelope_exact = j["envelope_exact"].get<bool>();
  }
  if (j.contains("config")) f.config = config_at(j["config"], "config");
  // Surface independence and unit errors at parse time.
  try {
    (void)build_space(f);
  } catch (const InvalidInput& e) {
    field_error("basis", e.what());
  }
  return f;
}

SpaceFile load_space_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open space file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_space_file(buf.str());
}

std::string emit_space_file(const SpaceFile& f) {
  Json j;
  j["format"] = kSpaceFormat;
  if (!f.name.empty()) j["name"] = f.name;
  if (f.kind == SpaceKind::Matrix) {
    j["kind"] = "matrix";
    j["rows"] = f.rows;
    j["cols"] = f.cols;
    Json basis = Json::array();
    for (const auto& m : f.basis) {
      Json rows = Json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
      }
      basis.push_back(std::move(rows));
    }
    j["basis"] = std::move(basis);
  } else {
    j["kind"] = "function";
    j["points"] = f.points;
    Json basis = Json::array();
    for (const auto& m : f.basis) {
      Json values = Json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) values.push_back(complex_json(m(r, 0)));
      basis.push_back(std::move(values));
    }
    j["basis"] = std::move(basis);
  }
  if (f.unit) j["unit"] = coeffs_json(*f.unit);
  if (!f.cone.empty()) {
    Json cone = Json::array();
    for (const auto& g : f.cone) cone.push_back(coeffs_json(g));
    j["cone"] = std::move(cone);
  }
  if (f.envelope_exact) j["envelope_exact"] = *f.envelope_exact;
  if (!f.config.empty()) j["config"] = config_json(f.config);
  return dump(j);
}

SpaceFile space_file_from_catalog(const CatalogEntry& e) {
  SpaceFile f;
  f.name = e.name;
  f.unit = e.space.unit();
  f.envelope_exact = e.envelope_exact;
  const Ambient& amb = e.space.ambient();
  if (e.fspace) {
    f.kind = SpaceKind::Function;
    f.points = e.fspace->points;
    for (const auto& v : e.fspace->basis) f.basis.emplace_back(f.points, 1, v);
  } else {
    f.kind = SpaceKind::Matrix;
    f.rows = amb.rows;
    f.cols = amb.cols;
    for (const auto& b : e.space.basis()) f.basis.push_back(amb.dense(b));
  }
  return f;
}

ConcreteOpSpace build_space(const SpaceFile& f) {
  if (f.kind == SpaceKind::Function) return min_opspace(*build_function_space(f));
  return ConcreteOpSpace::make(f.basis, f.unit);
}

std::optional<SampledFunctionSpace> build_function_space(const SpaceFile& f) {
  if (f.kind != SpaceKind::Function) return std::nullopt;
  std::vector<CVec> values;
  for (const auto& m : f.basis) {
    CVec v(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, 0);
    values.push_back(std::move(v));
  }
  return SampledFunctionSpace::make(std::move(values), f.unit);
}

bool resolve_envelope_exact(const SpaceFile& f, std::size_t generated_tro_dim) {
  if (f.envelope_exact) return *f.envelope_exact;
  if (f.kind == SpaceKind::Function) return true;
  return generated_tro_dim == f.dim();
}

// ---------------------------------------------------------------- flags

CVec parse_coeffs(const std::string& text) {
  CVec out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad coefficient '" + s + "' in '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw InvalidInput("bad coefficient '" + s + "' in '" + text + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.emplace_back(number(item), 0.0);
    } else {
      out.emplace_back(number(item.substr(0, colon)), number(item.substr(colon + 1)));
    }
  }
  if (out.empty()) throw InvalidInput("empty coefficient list");
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& z : parse_coeffs(text)) {
    if (z.imag() != 0.0) throw InvalidInput("expected real numbers in '" + text + "'");
    out.push_back(z.real());
  }
  return out;
}

// ---------------------------------------------------------------- reports

std::string report_to_json(const ReportFile& f) { return dump(report_file_json(f, true)); }

std::string report_to_json_canonical(const ReportFile& f) { return dump(report_file_json(f, false)); }

std::string report_to_text(const ReportFile& f) {
  std::ostringstream out;
  text_report(out, f.report, 0);
  for (const auto& [k, v] : f.vectors) out << k << " = " << coeffs_text(v) << '\n';
  if (!f.report.witness.empty()) out << "witness = " << coeffs_text(f.report.witness) << '\n';
  out << "seed " << f.seed << ", exit " << f.exit_code << '\n';
  return out.str();
}

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return 0;
    case Verdict::Fail:
      return 1;
    case Verdict::Inconclusive:
      return 2;
  }
  return 2;
}

}  // namespace opcert
