#include <random>

#include "doctest.h"
#include "opcert/certify.hpp"
#include "opcert/funcspace.hpp"
#include "opcert/tro.hpp"
#include "oracle.hpp"

using namespace opcert;

namespace {

CMat E(std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); }
ConcreteOpSpace m2() { return ConcreteOpSpace::make({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}, CVec{1, 0, 0, 1}); }

SolverConfig quick() {
  SolverConfig c;
  c.starts = 12;
  return c;
}

}  // namespace

TEST_CASE("identity has no row or column defect") {
  const auto s = m2();
  const CVec u{1, 0, 0, 1};
  CHECK(row_defect(s, u, 1, quick()).worst_defect <= 1e-6);
  CHECK(column_defect(s, u, 1, quick()).worst_defect <= 1e-6);
  CHECK(certify_unitary(s, u, 2, quick()).passed());
}

TEST_CASE("diag(1, 1/2) has defect three quarters at E22") {
  const auto s = m2();
  const CVec u{1, 0, 0, 0.5};
  const DefectProfile row = row_defect(s, u, 1, quick());
  CHECK(row.worst_defect >= 0.75 - 1e-6);
  CHECK(row.verdict == Verdict::Fail);
  // The witness lives in the second row, where u is short.
  const CVec& w = row.witness.at(0, 0);
  CHECK(std::norm(w[2]) + std::norm(w[3]) >= 1.0 - 1e-3);
  CHECK(column_defect(s, u, 1, quick()).worst_defect >= 0.75 - 1e-6);
  // Hand oracle: 1 + ||E22||^2 - ||[u E22]||^2 = 2 - 5/4.
  AmplifiedElement e22 = s.zero_amplified(1);
  e22.at(0, 0) = {0, 0, 0, 1};
  CHECK(defect_at(s, u, e22, Direction::Row) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("a row coisometry is not an isometry") {
  const auto row = ConcreteOpSpace::make({CMat::unit(1, 2, 0, 0), CMat::unit(1, 2, 0, 1)}, CVec{1, 0});
  const CVec u{1, 0};
  CHECK(certify_coisometry(row, u, 1, quick()).passed());
  CHECK(certify_isometry(row, u, 1, quick()).verdict == Verdict::Fail);
}

TEST_CASE("identity in span{I, E12} and z on the circle are unitaries") {
  const auto upper = ConcreteOpSpace::make({CMat::identity(2), E(0, 1)}, CVec{1, 0});
  CHECK(certify_unitary(upper, CVec{1, 0}, 1, quick()).passed());
  const CatalogEntry circle = catalog("circle-1zzbar", 360);
  CHECK(certify_unitary(circle.space, CVec{0, 1, 0}, 1, quick()).passed());
}

TEST_CASE("defect bounds and phase invariance") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto s = m2();
  for (int k = 0; k < 20; ++k) {
    CVec u(4);
    for (auto& z : u) z = cplx(g(rng), g(rng));
    const double un = s.norm(u);
    for (auto& z : u) z /= un;
    AmplifiedElement x = s.zero_amplified(2);
    for (auto& c : x.grid) {
      c.resize(4);
      for (auto& z : c) z = cplx(g(rng), g(rng));
    }
    const double xn = s.norm(x);
    for (auto& c : x.grid)
      for (auto& z : c) z /= xn;
    const double d = defect_at(s, u, x, Direction::Row);
    // 1 <= ||[u_n x]||^2 <= 1 + ||x||^2 translates to 0 <= defect <= 1 for norm-one x.
    CHECK(d >= -1e-12);
    CHECK(d <= 1.0 + 1e-12);
    AmplifiedElement y = x;
    const cplx phase = std::polar(1.0, g(rng));
    for (auto& c : y.grid)
      for (auto& z : c) z *= phase;
    CHECK(defect_at(s, u, y, Direction::Row) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("corner embedding preserves the defect") {
  const auto s = m2();
  const CVec u{1, 0, 0, 0.5};
  AmplifiedElement x = s.zero_amplified(1);
  x.at(0, 0) = {0.2, 0.3, cplx(0, 0.1), 0.9};
  const AmplifiedElement big = embed_corner(x, 2);
  CHECK(defect_at(s, u, big, Direction::Row) == doctest::Approx(defect_at(s, u, x, Direction::Row)).epsilon(1e-12));
  const DefectProfile l1 = row_defect(s, u, 1, quick());
  const DefectProfile l2 = row_defect(s, u, 2, quick());
  CHECK(l2.worst_defect >= l1.worst_defect - 1e-9);
}

TEST_CASE("ambient unitaries certify intrinsically") {
  std::mt19937_64 rng(52);
  const auto s = m2();
  const TroClosure c = generate_tro(s);
  for (int k = 0; k < 3; ++k) {
    const CVec u = oracle::m2_coeffs(oracle::random_unitary(2, rng));
    REQUIRE(ambient_unitary_check(c, u).passed());
    CHECK(certify_unitary(s, u, 1, quick()).passed());
  }
}
