// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any fails.
//
// Every criterion appends the canonical JSON of the reports it produced to a
// digest. The last criterion repeats the whole run with a different thread
// count and compares digests byte for byte.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "opcert/certify.hpp"
#include "opcert/cstar.hpp"
#include "opcert/funcspace.hpp"
#include "opcert/hermit.hpp"
#include "opcert/io.hpp"
#include "opcert/order.hpp"
#include "opcert/sysdetect.hpp"
#include "opcert/tro.hpp"
#include "oracle.hpp"

using namespace opcert;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Digest {
 public:
  explicit Digest(std::uint64_t seed) : seed_(seed) {}
  void add(const std::string& label, const CertificateReport& r) {
    ReportFile f;
    f.command = {label};
    f.seed = seed_;
    f.report = r;
    f.exit_code = exit_code_for(r.verdict);
    text_ += report_to_json_canonical(f);
  }
  void add(const std::string& label, const CVec& v) {
    text_ += label;
    for (const auto& z : v) text_ += " " + fmt(z.real()) + "," + fmt(z.imag());
    text_ += "\n";
  }
  void add(const std::string& label, double v) { text_ += label + " " + fmt(v) + "\n"; }
  const std::string& text() const { return text_; }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  std::uint64_t seed_;
  std::string text_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CMat E(std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); }
ConcreteOpSpace m2() { return ConcreteOpSpace::make({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}, CVec{1, 0, 0, 1}); }
const CVec kI{1, 0, 0, 1};

CVec adjoint_m2(const CVec& x) { return {std::conj(x[0]), std::conj(x[2]), std::conj(x[1]), std::conj(x[3])}; }

CVec sub(CVec a, const CVec& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

CVec random_ball(const ConcreteOpSpace& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> r(0.05, 1.0);
  CVec y(s.dim());
  for (auto& z : y) z = cplx(g(rng), g(rng));
  const double scale = r(rng) / s.norm(y);
  for (auto& z : y) z *= scale;
  return y;
}

double fixture_delta() {
  std::ifstream in(std::string(OPCERT_FIXTURE_DIR) + "/m2_upper_grid.json");
  if (!in) return -1.0;
  return nlohmann::json::parse(in).at("delta").get<double>();
}

// 1. Unitary certificates on M2.
Outcome unitary_soundness(const SolverConfig& cfg, Digest& dg, std::mt19937_64& rng) {
  const auto s = m2();
  double worst = 0.0;
  bool all = true;
  auto run = [&](const CVec& u, const std::string& label) {
    const CertificateReport r = certify_unitary(s, u, 2, cfg);
    dg.add(label, r);
    worst = std::max(worst, r.margin);
    all = all && r.passed() && r.margin <= 1e-6;
  };
  run(kI, "c1.identity");
  for (int k = 0; k < 20; ++k) run(oracle::m2_coeffs(oracle::random_unitary(2, rng)), "c1.random" + std::to_string(k));
  const CertificateReport d = certify_unitary(s, CVec{1, 0, 0, 0.5}, 2, cfg);
  dg.add("c1.diag", d);
  const bool fails = d.verdict == Verdict::Fail && d.margin >= 0.75 - 1e-4;
  return {all && fails, "worst unitary defect " + num(worst) + ", diag(1,1/2) defect " + num(d.margin)};
}

// 2. ||I + i t x||^2 = 1 + t^2 ||x||^2 for hermitian x.
Outcome hermitian_equality(const SolverConfig& cfg, Digest& dg, std::mt19937_64& rng) {
  const auto s = m2();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    CMat h = oracle::random_hermitian(2, 1.0, rng);
    h *= cplx(std::uniform_real_distribution<double>(0.05, 1.0)(rng) / oracle::norm(h));
    const HermitianProfile p = is_u_hermitian(s, kI, oracle::m2_coeffs(h), cfg.t_grid);
    for (double v : p.scalar_slack_pos) worst = std::max(worst, std::abs(v));
    for (double v : p.scalar_slack_neg) worst = std::max(worst, std::abs(v));
    dg.add("c2.slack" + std::to_string(k), p.min_slack);
  }
  return {worst <= 1e-8, "worst |scalar slack| " + num(worst)};
}

// 3. Involution recovery at t = 100 against the matrix adjoint.
Outcome involution_bound(const SolverConfig& cfg, Digest& dg, std::mt19937_64& rng) {
  const auto s = m2();
  const double bound = recovery_bound(100.0) + 1e-4;
  double worst = 0.0;
  int improved = 0;
  for (int k = 0; k < 20; ++k) {
    const CVec x = random_ball(s, rng);
    const CVec truth = adjoint_m2(x);
    const InvolutionRecovery r100 = recover_involution(s, kI, x, 100.0, cfg);
    const InvolutionRecovery r10 = recover_involution(s, kI, x, 10.0, cfg);
    const double e100 = oracle::norm(s.embed(sub(r100.coeffs, truth)));
    const double e10 = oracle::norm(s.embed(sub(r10.coeffs, truth)));
    worst = std::max(worst, e100);
    if (e100 < e10) ++improved;
    dg.add("c3.t100." + std::to_string(k), r100.coeffs);
    dg.add("c3.t10." + std::to_string(k), r10.coeffs);
  }
  return {worst <= bound && improved >= 18,
          "worst error " + num(worst) + " (bound " + num(bound) + "), t=100 better in " + std::to_string(improved) + "/20"};
}

// 4. Product recovery and the reconstructed multiplication table.
Outcome product_recovery(const SolverConfig& cfg, Digest& dg, std::mt19937_64& rng) {
  const auto s = m2();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CMat v = oracle::random_unitary(2, rng);
    const CVec y = random_ball(s, rng);
    const ProductRecovery r = recover_product(s, kI, oracle::m2_coeffs(v), y, 100.0, cfg);
    worst = std::max(worst, oracle::norm(s.embed(r.coeffs) - v * s.embed(y).adjoint()));
    dg.add("c4.product" + std::to_string(k), r.coeffs);
  }
  const CStarResult cs = detect_cstar(s, kI, cfg);
  dg.add("c4.cstar", cs.report);
  if (!cs.table) return {false, "no product table (detect_cstar " + std::string(to_string(cs.report.verdict)) + ")"};
  const ProductTable& tab = *cs.table;

  double table_err = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const CMat diff = s.embed(tab.entries[i * 4 + j]) - s.basis()[i] * s.basis()[j];
      for (const auto& z : diff.entries()) table_err = std::max(table_err, std::abs(z));
    }
  double assoc = 0.0;
  double cstar = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CVec a = random_ball(s, rng);
    const CVec b = random_ball(s, rng);
    const CVec c = random_ball(s, rng);
    assoc = std::max(assoc, oracle::norm(s.embed(sub(tab.multiply(tab.multiply(a, b), c),
                                                     tab.multiply(a, tab.multiply(b, c))))));
    const double n = s.norm(a);
    cstar = std::max(cstar, std::abs(s.norm(tab.multiply(tab.adjoint(a), a)) - n * n));
  }
  const bool pass = worst <= 0.0101 + 1e-4 && table_err <= 1e-3 && assoc <= 1e-3 && cstar <= 1e-3;
  return {pass, "product error " + num(worst) + ", table " + num(table_err) + ", associativity " + num(assoc) +
                    ", C*-identity " + num(cstar)};
}

// 5. Operator-system detection on the three matrix examples.
Outcome system_detection(const SolverConfig& cfg, Digest& dg) {
  const double delta = fixture_delta();
  if (delta <= 0.0) return {false, "missing grid fixture"};
  bool pass = true;
  std::string detail;
  for (const std::string name : {"m2-full", "m2-sym3", "m2-upper"}) {
    const CatalogEntry e = catalog(name);
    const TroClosure c = generate_tro(e.space, e.envelope_exact);
    const CVec& u = e.space.require_unit();
    const CertificateReport intrinsic = detect_operator_system(e.space, u, cfg);
    const CertificateReport ambient = ambient_system_check(c, u);
    dg.add("c5." + name, intrinsic);
    dg.add("c5." + name + ".ambient", ambient);
    const bool expect_pass = name != "m2-upper";
    const bool ok = expect_pass ? (intrinsic.passed() && intrinsic.margin <= 1e-4)
                                : (intrinsic.verdict == Verdict::Fail && intrinsic.margin >= delta);
    pass = pass && ok && intrinsic.verdict == ambient.verdict;
    detail += name + " " + num(intrinsic.margin) + " ";
  }
  return {pass, detail + "(delta " + num(delta) + ")"};
}

// 6. Scalar criteria on span{1, z, conj z}.
Outcome function_criteria(const SolverConfig& cfg, Digest& dg) {
  bool pass = true;
  std::string detail;
  for (std::size_t m : {360u, 720u}) {
    const CatalogEntry e = catalog("circle-1zzbar", m);
    const auto& fs = *e.fspace;
    if (m == 360) {
      for (const auto& [label, g] : {std::pair<std::string, CVec>{"1", {1, 0, 0}}, {"z", {0, 1, 0}}}) {
        const CertificateReport r = scalar_unitary_check(fs, g, cfg);
        dg.add("c6.unitary." + label, r);
        pass = pass && r.passed() && r.margin <= sampling_tolerance(m);
        detail += "sup gap g=" + label + " " + num(r.margin) + ", ";
      }
    }
    const std::size_t d1 = g_hermitian_solve(fs, CVec{1, 0, 0}).real_basis.size();
    const std::size_t dz = g_hermitian_solve(fs, CVec{0, 1, 0}).real_basis.size();
    dg.add("c6.dims" + std::to_string(m), static_cast<double>(d1 * 10 + dz));
    pass = pass && d1 == 3 && dz == 1;
    detail += "m=" + std::to_string(m) + " dims " + std::to_string(d1) + "/" + std::to_string(dz) + " ";
  }
  return {pass, detail};
}

// 7. The single t = 1 constraint is weaker than the full grid on span{1, z}.
Outcome t1_insufficiency(const SolverConfig& cfg, Digest& dg) {
  const CatalogEntry e = catalog("circle-1z", 360);
  const CertificateReport r = t1_insufficiency_probe(e.space, e.space.require_unit(), CVec{0, 1}, cfg);
  dg.add("c7.probe", r);
  std::string detail = "probe " + std::string(to_string(r.verdict));
  if (r.parts.size() == 2)
    detail += ": t=1 residual " + num(r.parts[0].margin) + ", full grid residual " + num(r.parts[1].margin);
  return {r.passed(), detail};
}

// 8. The two-circle model with g = +-1.
Outcome two_circles(const SolverConfig& cfg, Digest& dg) {
  const CatalogEntry e = catalog("two-circles", 360);
  const auto& fs = *e.fspace;
  const CVec& g = e.candidates.at(0).second;
  const CertificateReport cert = certify_unitary(e.space, g, 2, cfg);
  const CertificateReport scalar = scalar_unitary_check(fs, g, cfg);
  bool real = true;
  for (const auto& z : fs.evaluate(g)) real = real && std::abs(z.imag()) <= kUnimodularTol;
  const CertificateReport sa = selfadjoint_unit_check(fs, g);
  const TroClosure c = generate_tro(e.space, e.envelope_exact);
  const CertificateReport same = same_involution_check(c, e.space.require_unit(), g);
  dg.add("c8.certify", cert);
  dg.add("c8.scalar", scalar);
  dg.add("c8.selfadjoint", sa);
  dg.add("c8.same", same);
  const bool pass = fs.points == 720 && cert.passed() && scalar.passed() && real && sa.passed() && same.passed();
  return {pass, "points " + std::to_string(fs.points) + ", defect " + num(cert.margin) + ", real " +
                    (real ? "yes" : "no") + ", selfadjoint " + std::string(to_string(sa.verdict)) + ", same involution " +
                    std::string(to_string(same.verdict))};
}

// 9. TRO closure of span{I, E12, E21}.
Outcome tro_closure(Digest& dg) {
  const CatalogEntry e = catalog("m2-sym3");
  const TroClosure c = generate_tro(e.space);
  const TroClosure again = generate_tro(ConcreteOpSpace::make(c.z_basis));
  double resid = 0.0;
  for (const auto& a : c.z_basis)
    for (const auto& b : c.z_basis)
      for (const auto& d : c.z_basis) resid = std::max(resid, c.z_residual(c.ambient().triple(a, b, d)));
  dg.add("c9.dim", static_cast<double>(c.z_basis.size()));
  dg.add("c9.residual", resid);
  const bool pass = c.z_basis.size() == 4 && again.z_basis.size() == 4 && resid <= 1e-8;
  return {pass, "dim " + std::to_string(c.z_basis.size()) + ", re-closed dim " + std::to_string(again.z_basis.size()) +
                    ", ternary residual " + num(resid)};
}

// 10. Order unit and cone comparison on M2.
Outcome order_module(const SolverConfig& cfg, Digest& dg) {
  const auto s = m2();
  const TroClosure c = generate_tro(s, true);
  const Cone cone = Cone::make(s, {{1, 0, 0, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}, {1, cplx(0, -1), cplx(0, 1), 1}, kI});
  const DeltaSpan d = delta_span(s, kI, &c, cfg.t_grid);
  const CertificateReport unit = norm_order_unit_check(cone, kI, d.hermitian_basis, cfg);
  const CertificateReport equal = cone_equals_delta_plus(cone, kI, c, cfg);
  const CertificateReport dropped = cone_equals_delta_plus(cone.without(1), kI, c, cfg);
  dg.add("c10.unit", unit);
  dg.add("c10.equal", equal);
  dg.add("c10.dropped", dropped);
  const double drop_resid = dropped.parts.size() == 2 ? dropped.parts[1].margin : 0.0;
  const bool flip = dropped.verdict == Verdict::Fail && drop_resid >= 0.1;
  return {unit.passed() && equal.passed() && flip,
          "order unit " + std::string(to_string(unit.verdict)) + " (" + num(unit.margin) + "), cone = Delta+ " +
              std::string(to_string(equal.verdict)) + " (" + num(equal.margin) + "), without E22 " +
              std::string(to_string(dropped.verdict)) + " (" + num(drop_resid) + ")"};
}

struct Run {
  std::vector<Outcome> outcomes;
  std::string digest;
  double seconds = 0.0;
};

Run run_all(const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Digest dg(cfg.seed);
  std::mt19937_64 rng(cfg.seed);
  Run run;
  run.outcomes.push_back(unitary_soundness(cfg, dg, rng));
  run.outcomes.push_back(hermitian_equality(cfg, dg, rng));
  run.outcomes.push_back(involution_bound(cfg, dg, rng));
  run.outcomes.push_back(product_recovery(cfg, dg, rng));
  run.outcomes.push_back(system_detection(cfg, dg));
  run.outcomes.push_back(function_criteria(cfg, dg));
  run.outcomes.push_back(t1_insufficiency(cfg, dg));
  run.outcomes.push_back(two_circles(cfg, dg));
  run.outcomes.push_back(tro_closure(dg));
  run.outcomes.push_back(order_module(cfg, dg));
  run.digest = dg.text();
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace

int main() {
  SolverConfig first;
  first.threads = 1;
  SolverConfig second = first;
  second.threads = 4;

  const Run a = run_all(first);
  const Run b = run_all(second);

  int failures = 0;
  auto line = [&](int k, const Outcome& o) {
    std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    if (!o.pass) ++failures;
  };
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) line(static_cast<int>(k + 1), a.outcomes[k]);
  const bool same = a.digest == b.digest;
  if (const char* dir = std::getenv("OPCERT_DIGEST_DIR")) {
    std::ofstream(std::string(dir) + "/digest_threads1.txt") << a.digest;
    std::ofstream(std::string(dir) + "/digest_threads4.txt") << b.digest;
  }
  line(11, {same, "digest " + std::to_string(a.digest.size()) + " bytes, threads 1 vs 4 " +
                      (same ? "identical" : "differ") + " (" + num(a.seconds) + " s / " + num(b.seconds) + " s)"});
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
