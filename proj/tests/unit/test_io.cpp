#include "doctest.h"
#include "opcert/errors.hpp"
#include "opcert/io.hpp"

using namespace opcert;

TEST_CASE("every catalog entry round-trips byte for byte") {
  for (const auto& name : catalog_names()) {
    const std::string first = emit_space_file(space_file_from_catalog(catalog(name, 45)));
    const std::string second = emit_space_file(parse_space_file(first));
    CHECK(first == second);
  }
}

TEST_CASE("two-circle file has four functions on 720 points") {
  const SpaceFile f = parse_space_file(emit_space_file(space_file_from_catalog(catalog("two-circles"))));
  CHECK(f.kind == SpaceKind::Function);
  CHECK(f.points == 720);
  CHECK(f.dim() == 4);
  CHECK(build_function_space(f)->points == 720);
}

TEST_CASE("config overrides round-trip and apply") {
  SpaceFile f = space_file_from_catalog(catalog("m2-sym3"));
  f.config.seed = 7;
  f.config.t_grid = std::vector<double>{0.5, 0.1, 3.0};
  f.config.cert_tol = 1e-5;
  const std::string text = emit_space_file(f);
  const SpaceFile g = parse_space_file(text);
  CHECK(emit_space_file(g) == text);
  SolverConfig c;
  g.config.apply(c);
  CHECK(c.seed == 7);
  CHECK(c.t_grid == std::vector<double>{0.5, 0.1, 3.0});
  CHECK(c.cert_tol == 1e-5);
}

TEST_CASE("malformed files name the offending field") {
  auto message = [](const std::string& text) {
    try {
      parse_space_file(text);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{").find("syntax error") != std::string::npos);
  CHECK(message(R"({"format":"x"})").find("format") != std::string::npos);
  const std::string head = R"({"format":"opcert-space/1","kind":"matrix","rows":1,"cols":1,)";
  CHECK(message(head + R"("basis":[[[[1,0]]]],"unit":[[1,0],[2,0]]})").find("unit") != std::string::npos);
  CHECK(message(head + R"("basis":[[[[1]]]]})").find("basis[0][0][0]") != std::string::npos);
  CHECK(message(head + R"("basis":[[[[1,0]]],[[[2,0]]]]})").find("dependent") != std::string::npos);
  CHECK(message(head + R"("basis":[[[[1,0]]]],"config":{"starts":0}})").find("config.starts") != std::string::npos);
  CHECK(message(head + R"("basis":[[[[1,0]]]],"extra":1})").find("extra") != std::string::npos);
  CHECK(message(head + R"("basis":[[[[1,0]]]]})").empty());
}

TEST_CASE("coefficient flags") {
  const CVec c = parse_coeffs("1,0:1,-2.5:0.5");
  CHECK(c == CVec{1.0, cplx(0, 1), cplx(-2.5, 0.5)});
  CHECK_THROWS_AS(parse_coeffs("1,x"), InvalidInput);
  CHECK_THROWS_AS(parse_coeffs(""), InvalidInput);
  CHECK(parse_reals("0.25,1,32") == std::vector<double>{0.25, 1.0, 32.0});
  CHECK_THROWS_AS(parse_reals("1:1"), InvalidInput);
}

TEST_CASE("report serialization") {
  ReportFile f;
  f.command = {"opcert", "check", "unitary", "x.json"};
  f.seed = 42;
  f.timestamp = "2000-01-01T00:00:00Z";
  f.report.check = "unitary";
  f.report.verdict = Verdict::Fail;
  f.report.margin = 0.1;
  f.report.witness = {cplx(0, -0.0), 1.0};
  f.report.metrics.emplace_back("level", 2.0);
  f.exit_code = exit_code_for(f.report.verdict);
  const std::string json = report_to_json(f);
  CHECK(json.find("\"timestamp\"") != std::string::npos);
  CHECK(json.find("0.10000000000000001") != std::string::npos);
  CHECK(json.find("[[0, 0], [1, 0]]") != std::string::npos);
  CHECK(report_to_json_canonical(f).find("timestamp") == std::string::npos);
  CHECK(exit_code_for(Verdict::Pass) == 0);
  CHECK(exit_code_for(Verdict::Fail) == 1);
  CHECK(exit_code_for(Verdict::Inconclusive) == 2);
}
