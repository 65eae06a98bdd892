#include <random>

#include "doctest.h"
#include "opcert/errors.hpp"
#include "opcert/opspace.hpp"
#include "oracle.hpp"

using namespace opcert;

namespace {
CMat E(std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); }
ConcreteOpSpace m2() { return ConcreteOpSpace::make({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}, CVec{1, 0, 0, 1}); }
}  // namespace

TEST_CASE("construction and validation") {
  CHECK(ConcreteOpSpace::make({CMat::identity(2)}).dim() == 1);
  CHECK(ConcreteOpSpace::make({CMat::identity(2), E(0, 1), E(1, 0), E(1, 1)}).dim() == 4);
  CHECK_THROWS_AS(ConcreteOpSpace::make({E(0, 1), E(0, 1) * cplx(2.0)}), InvalidInput);
  CHECK_THROWS_AS(ConcreteOpSpace::make({}), InvalidInput);
  CHECK_THROWS_AS(ConcreteOpSpace::make({E(0, 1), CMat::identity(3)}), InvalidInput);
  CHECK_THROWS_AS(ConcreteOpSpace::make({E(0, 1)}, CVec{1, 0}), InvalidInput);
  CHECK_THROWS_AS(ConcreteOpSpace::make({E(0, 1)}).require_unit(), PreconditionError);
}

TEST_CASE("all-diagonal bases switch to compact storage") {
  const auto s = ConcreteOpSpace::make({E(0, 0), E(1, 1)});
  CHECK(s.diagonal());
  CHECK(s.basis()[0].cols() == 1);
  CHECK_FALSE(m2().diagonal());
}

TEST_CASE("membership") {
  const auto upper = ConcreteOpSpace::make({CMat::identity(2), E(0, 1)}, CVec{1, 0});
  const Membership own = upper.membership(E(0, 1));
  CHECK(own.member);
  CHECK(std::abs(own.coeffs[1] - cplx(1.0)) < 1e-12);
  const Membership orth = upper.membership(E(1, 0));
  CHECK_FALSE(orth.member);
  CHECK(orth.residual == doctest::Approx(1.0));
  // E11 projects onto I/2, leaving residual^2 = 1/2.
  const Membership e11 = upper.membership(E(0, 0));
  CHECK(e11.residual * e11.residual == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e11.residual == doctest::Approx(oracle::span_distance({CMat::identity(2), E(0, 1)}, E(0, 0))).epsilon(1e-12));
}

TEST_CASE("membership recovers embedded coefficients") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto s = ConcreteOpSpace::make({CMat::identity(2), E(0, 1), E(1, 0)});
  for (int k = 0; k < 20; ++k) {
    CVec c(3);
    for (auto& z : c) z = cplx(g(rng), g(rng));
    const Membership m = s.membership(s.embed(c));
    CHECK(m.residual <= 1e-10);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(m.coeffs[i] - c[i]) <= 1e-8);
  }
}

TEST_CASE("amplified unit and norms") {
  const auto s = m2();
  CHECK(frobenius_norm(s.embed(s.amplify_unit(1)) - CMat::identity(2)) == 0.0);
  CHECK(frobenius_norm(s.embed(s.amplify_unit(2)) - CMat::identity(4)) == 0.0);
  CHECK(frobenius_norm(s.embed(s.amplify_unit(3)) - CMat::identity(6)) == 0.0);
  CHECK(s.norm(CVec(4)) == 0.0);
  CHECK(s.norm(s.require_unit()) == doctest::Approx(1.0));
  for (std::size_t n = 1; n <= 3; ++n) CHECK(s.norm(s.amplify_unit(n)) == doctest::Approx(1.0));

  AmplifiedElement d = s.zero_amplified(2);
  d.at(0, 0) = {2, 0, 0, 0};
  d.at(1, 1) = {0, 3, 0, 0};
  CHECK(s.norm(d) == doctest::Approx(3.0));
}

TEST_CASE("concrete norm properties on random instances") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto s = m2();
  for (int k = 0; k < 20; ++k) {
    CVec x(4);
    CVec y(4);
    for (auto& z : x) z = cplx(g(rng), g(rng));
    for (auto& z : y) z = cplx(g(rng), g(rng));
    AmplifiedElement sum = s.zero_amplified(2);
    sum.at(0, 0) = x;
    sum.at(1, 1) = y;
    CHECK(s.norm(sum) == doctest::Approx(std::max(s.norm(x), s.norm(y))).epsilon(1e-12));
    const CMat a = oracle::random_matrix(2, 2, rng);
    const CMat b = oracle::random_matrix(2, 2, rng);
    CHECK(spectral_norm(a * s.embed(x) * b) <= spectral_norm(a) * s.norm(x) * spectral_norm(b) * (1 + 1e-9));
    CHECK(s.norm(x) == doctest::Approx(oracle::norm(s.embed(x))).epsilon(1e-12));
  }
}

TEST_CASE("diagonal spaces measure blockwise sups") {
  const CVec one(4, 1.0);
  const CVec z{1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  const auto s = ConcreteOpSpace::make_diagonal(4, {one, z}, CVec{1, 0});
  CHECK(s.norm(CVec{0, 1}) == doctest::Approx(1.0));
  CHECK(s.norm(CVec{1, 1}) == doctest::Approx(2.0));
  AmplifiedElement x = s.zero_amplified(2);
  x.at(0, 1) = {0, 1};
  x.at(1, 0) = {1, 0};
  CHECK(s.norm(x) == doctest::Approx(1.0));
}

TEST_CASE("real and complex coefficient conversion round-trips") {
  const CVec c{cplx(1, 2), cplx(-3, 0.5)};
  const RVec r = ConcreteOpSpace::real_from_coeffs(c);
  CHECK(r == RVec{1, 2, -3, 0.5});
  CHECK(ConcreteOpSpace::coeffs_from_real(r) == c);
}
