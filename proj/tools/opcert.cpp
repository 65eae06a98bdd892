// opcert: command-line front end for the certificate library.
//
//   opcert check <kind> FILE [--element c] [--level n] [--t-grid a,b] [--seed s] [--tol e] [--out path]
//   opcert recover involution FILE --x c [--t t]
//   opcert recover product FILE --v c --y c [--t t]
//   opcert catalog list
//   opcert catalog emit NAME [--out path] [--points n]
//
// Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 input or precondition error.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opcert/certify.hpp"
#include "opcert/cstar.hpp"
#include "opcert/errors.hpp"
#include "opcert/funcspace.hpp"
#include "opcert/hermit.hpp"
#include "opcert/io.hpp"
#include "opcert/order.hpp"
#include "opcert/sysdetect.hpp"
#include "opcert/tro.hpp"

using namespace opcert;

namespace {

constexpr int kInputError = 3;

const std::vector<std::string> kCheckKinds = {"unitary",    "isometry", "coisometry",       "hermitian",
                                              "positive",   "system",   "cstar",            "function-unitary",
                                              "function-system", "order-unit"};

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> t_grid;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::string format = "text";
};

struct Context {
  SpaceFile file;
  ConcreteOpSpace space;
  std::optional<SampledFunctionSpace> fspace;
  SolverConfig config;
};

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("OPSPACE_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw InvalidInput("OPSPACE_SEED is not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

// Seed precedence: flag, file, environment, built-in default.
Context load_context(const std::string& path, const CommonFlags& flags) {
  SpaceFile file = load_space_file(path);
  ConcreteOpSpace space = build_space(file);
  std::optional<SampledFunctionSpace> fspace = build_function_space(file);
  SolverConfig config;
  if (auto s = env_seed()) config.seed = *s;
  file.config.apply(config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.tol) config.cert_tol = *flags.tol;
  if (flags.t_grid) config.t_grid = parse_reals(*flags.t_grid);
  if (flags.threads) config.threads = *flags.threads;
  config.validate();
  return Context{std::move(file), std::move(space), std::move(fspace), std::move(config)};
}

CVec element_or_unit(const Context& ctx, const std::optional<std::string>& element) {
  if (element) {
    CVec c = parse_coeffs(*element);
    if (c.size() != ctx.space.dim()) {
      throw InvalidInput("element has " + std::to_string(c.size()) + " coefficients, space dimension is " +
                         std::to_string(ctx.space.dim()));
    }
    return c;
  }
  return ctx.space.require_unit();
}

CVec required_element(const Context& ctx, const std::optional<std::string>& element, const char* flag) {
  if (!element) throw InvalidInput(std::string("missing ") + flag);
  return element_or_unit(ctx, element);
}

TroClosure closure_for(const Context& ctx) {
  TroClosure c = generate_tro(ctx.space);
  c.envelope_exact = resolve_envelope_exact(ctx.file, c.z_basis.size());
  return c;
}

const SampledFunctionSpace& require_fspace(const Context& ctx) {
  if (!ctx.fspace) throw InvalidInput("this check needs a function space file");
  return *ctx.fspace;
}

CertificateReport hermitian_report(const HermitianProfile& p, const CVec& x) {
  CertificateReport r;
  r.check = "u-hermitian";
  r.verdict = p.verdict;
  r.margin = p.min_slack;
  r.bound = Bound::Exact;
  r.scope = Scope::Intrinsic;
  r.witness = x;
  r.metrics.emplace_back("scale", p.scale);
  for (std::size_t k = 0; k < p.t_grid.size(); ++k) {
    const std::string t = short_number(p.t_grid[k]);
    r.metrics.emplace_back("matricial_slack@" + t, p.matricial_slack[k]);
    r.metrics.emplace_back("scalar_slack@+" + t, p.scalar_slack_pos[k]);
    r.metrics.emplace_back("scalar_slack@-" + t, p.scalar_slack_neg[k]);
  }
  return r;
}

CertificateReport run_check(const std::string& kind, const Context& ctx, const std::optional<std::string>& element,
                            std::size_t level) {
  const SolverConfig& cfg = ctx.config;
  if (kind == "unitary") return certify_unitary(ctx.space, element_or_unit(ctx, element), level, cfg);
  if (kind == "isometry") return certify_isometry(ctx.space, element_or_unit(ctx, element), level, cfg);
  if (kind == "coisometry") return certify_coisometry(ctx.space, element_or_unit(ctx, element), level, cfg);
  if (kind == "hermitian") {
    const CVec x = required_element(ctx, element, "--element");
    return hermitian_report(is_u_hermitian(ctx.space, ctx.space.require_unit(), x, cfg.t_grid), x);
  }
  if (kind == "positive") {
    const CVec x = required_element(ctx, element, "--element");
    return is_u_positive(ctx.space, ctx.space.require_unit(), x, cfg.t_grid);
  }
  if (kind == "system") {
    const TroClosure closure = closure_for(ctx);
    DetectOptions opts;
    opts.closure = &closure;
    return detect_operator_system(ctx.space, element_or_unit(ctx, element), cfg, opts);
  }
  if (kind == "cstar") {
    const TroClosure closure = closure_for(ctx);
    CStarOptions opts;
    opts.closure = &closure;
    return detect_cstar(ctx.space, element_or_unit(ctx, element), cfg, opts).report;
  }
  if (kind == "function-unitary") return scalar_unitary_check(require_fspace(ctx), element_or_unit(ctx, element), cfg);
  if (kind == "function-system") return function_system_check(require_fspace(ctx), element_or_unit(ctx, element));
  if (kind == "order-unit") {
    if (ctx.file.cone.empty()) throw InvalidInput("order-unit needs cone generators in the space file");
    const CVec u = element_or_unit(ctx, element);
    const TroClosure closure = closure_for(ctx);
    const DeltaSpan delta = delta_span(ctx.space, u, &closure, cfg.t_grid);
    return norm_order_unit_check(Cone::make(ctx.space, ctx.file.cone), u, delta.hermitian_basis, cfg);
  }
  throw InvalidInput("unknown check kind '" + kind + "'");
}

int emit(ReportFile& report, const CommonFlags& flags) {
  report.timestamp = utc_timestamp();
  if (flags.out) {
    std::ofstream out(*flags.out, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + *flags.out + "'");
    out << report_to_json(report);
  }
  std::cout << (flags.format == "json" ? report_to_json(report) : report_to_text(report));
  return report.exit_code;
}

ReportFile recover_involution_report(const Context& ctx, const CVec& x, double t) {
  const CVec u = ctx.space.require_unit();
  const InvolutionRecovery rec = recover_involution(ctx.space, u, x, t, ctx.config);
  ReportFile f;
  f.vectors.emplace_back("recovered", rec.coeffs);
  CertificateReport& r = f.report;
  r.check = "recover-involution";
  r.bound = Bound::UpperBound;
  r.witness = x;
  r.diagnostics = rec.diagnostics;
  r.margin = rec.residual;
  r.verdict = Verdict::Pass;
  r.metrics.emplace_back("t", t);
  r.metrics.emplace_back("partner_residual", rec.residual);
  r.metrics.emplace_back("bound", rec.bound);
  const TroClosure closure = closure_for(ctx);
  r.scope = closure.scope();
  if (ambient_unitary_check(closure, u).passed()) {
    const Membership truth = ctx.space.membership(involution(closure, u, x));
    if (truth.member) {
      CVec diff = rec.coeffs;
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= truth.coeffs[k];
      const double err = ctx.space.norm(diff);
      f.vectors.emplace_back("ambient", truth.coeffs);
      r.metrics.emplace_back("ambient_error", err);
      r.margin = err;
      r.verdict = err <= rec.bound ? Verdict::Pass : Verdict::Fail;
    } else {
      r.notes.emplace_back("u x* u lies outside X");
      r.verdict = Verdict::Fail;
    }
  } else {
    r.notes.emplace_back("u is not unitary in the generated TRO; no ambient comparison");
  }
  return f;
}

ReportFile recover_product_report(const Context& ctx, const CVec& v, const CVec& y, double t) {
  const CVec u = ctx.space.require_unit();
  const ProductRecovery rec = recover_product(ctx.space, u, v, y, t, ctx.config);
  ReportFile f;
  f.vectors.emplace_back("recovered", rec.coeffs);
  CertificateReport& r = f.report;
  r.check = "recover-product";
  r.bound = Bound::UpperBound;
  r.witness = y;
  r.diagnostics = rec.diagnostics;
  r.margin = rec.excess;
  r.verdict = rec.verdict;
  r.metrics.emplace_back("t", t);
  r.metrics.emplace_back("excess", rec.excess);
  r.metrics.emplace_back("bound", rec.bound);
  if (rec.verdict == Verdict::Fail) r.notes.emplace_back("product escapes X");
  const TroClosure closure = closure_for(ctx);
  r.scope = closure.scope();
  const Ambient& amb = ctx.space.ambient();
  const CMat truth = amb.triple(ctx.space.embed(v), ctx.space.embed(y), ctx.space.embed(u));
  const Membership mem = ctx.space.membership(truth);
  r.metrics.emplace_back("ambient_membership_residual", mem.residual);
  if (mem.member) {
    const double err = amb.norm(ctx.space.embed(rec.coeffs) - truth);
    f.vectors.emplace_back("ambient", mem.coeffs);
    r.metrics.emplace_back("ambient_error", err);
    if (rec.verdict == Verdict::Pass && err > rec.bound) r.verdict = Verdict::Fail;
  } else if (rec.verdict == Verdict::Pass) {
    r.notes.emplace_back("v y* u lies outside X in the ambient algebra");
  }
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opcert: numerical certificates for unital operator spaces"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", flags.seed, "root seed (overrides the file and OPSPACE_SEED)");
    cmd->add_option("--tol", flags.tol, "certificate tolerance");
    cmd->add_option("--t-grid", flags.t_grid, "comma-separated t values");
    cmd->add_option("--threads", flags.threads, "solver threads");
    cmd->add_option("--out", flags.out, "write the JSON report to this path");
    cmd->add_option("--format", flags.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
  };

  std::string kind;
  std::string file;
  std::optional<std::string> element;
  std::size_t level = 2;
  auto* check = app.add_subcommand("check", "run a certificate on a space file");
  check->add_option("kind", kind, "check kind")->required()->check(CLI::IsMember(kCheckKinds));
  check->add_option("file", file, "space file")->required();
  check->add_option("--element", element, "coefficients re:im,re,... (defaults to the unit)");
  check->add_option("--level", level, "highest matrix level for unitary-type checks")->check(CLI::Range(1, 8));
  add_common(check);

  std::string recover_kind;
  std::optional<std::string> x_flag;
  std::optional<std::string> v_flag;
  std::optional<std::string> y_flag;
  std::optional<double> t_flag;
  auto* recover = app.add_subcommand("recover", "recover the involution or a product");
  recover->add_option("kind", recover_kind, "involution | product")
      ->required()
      ->check(CLI::IsMember({"involution", "product"}));
  recover->add_option("file", file, "space file")->required();
  recover->add_option("--x", x_flag, "element for involution recovery");
  recover->add_option("--v", v_flag, "unitary v for product recovery");
  recover->add_option("--y", y_flag, "ball element y for product recovery");
  recover->add_option("--t", t_flag, "scale parameter t (default: t_large)");
  add_common(recover);

  std::string catalog_action;
  std::string catalog_name;
  std::size_t points = 360;
  auto* cat = app.add_subcommand("catalog", "list or emit built-in example spaces");
  cat->add_option("action", catalog_action, "list | emit")->required()->check(CLI::IsMember({"list", "emit"}));
  cat->add_option("name", catalog_name, "catalog name for emit");
  cat->add_option("--out", flags.out, "output path (stdout when absent)");
  cat->add_option("--points", points, "samples per circle for function spaces")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    std::vector<std::string> command(argv, argv + argc);
    if (cat->parsed()) {
      if (catalog_action == "list") {
        for (const auto& n : catalog_names()) std::cout << n << '\n';
        return 0;
      }
      if (catalog_name.empty()) throw InvalidInput("catalog emit needs a name");
      const std::string text = emit_space_file(space_file_from_catalog(catalog(catalog_name, points)));
      if (flags.out) {
        std::ofstream out(*flags.out, std::ios::binary);
        if (!out) throw InvalidInput("cannot write '" + *flags.out + "'");
        out << text;
      } else {
        std::cout << text;
      }
      return 0;
    }
    const Context ctx = load_context(file, flags);
    ReportFile report;
    if (check->parsed()) {
      report.report = run_check(kind, ctx, element, level);
    } else {
      const double t = t_flag.value_or(ctx.config.t_large);
      if (recover_kind == "involution") {
        report = recover_involution_report(ctx, required_element(ctx, x_flag, "--x"), t);
      } else {
        report = recover_product_report(ctx, required_element(ctx, v_flag, "--v"),
                                        required_element(ctx, y_flag, "--y"), t);
      }
    }
    report.command = std::move(command);
    report.seed = ctx.config.seed;
    report.exit_code = exit_code_for(report.report.verdict);
    return emit(report, flags);
  } catch (const InvalidInput& e) {
    std::cerr << "opcert: input error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    std::cerr << "opcert: precondition failed: " << e.what() << '\n';
  } catch (const SolverError& e) {
    std::cerr << "opcert: solver error: " << e.what() << '\n';
  }
  return kInputError;
}
