#include <random>

#include "doctest.h"
#include "opcert/funcspace.hpp"
#include "opcert/hermit.hpp"
#include "oracle.hpp"

using namespace opcert;

namespace {

CMat E(std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); }
ConcreteOpSpace m2() { return ConcreteOpSpace::make({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}, CVec{1, 0, 0, 1}); }
ConcreteOpSpace sym3() { return ConcreteOpSpace::make({CMat::identity(2), E(0, 1), E(1, 0)}, CVec{1, 0, 0}); }
ConcreteOpSpace upper() { return ConcreteOpSpace::make({CMat::identity(2), E(0, 1)}, CVec{1, 0}); }
const RVec kGrid = SolverConfig{}.t_grid;

}  // namespace

TEST_CASE("u is u-hermitian") {
  const auto s = m2();
  CHECK(is_u_hermitian(s, CVec{1, 0, 0, 1}, CVec{1, 0, 0, 1}, kGrid).verdict == Verdict::Pass);
}

TEST_CASE("E12 is not hermitian for the identity") {
  const auto s = m2();
  const HermitianProfile p = is_u_hermitian(s, CVec{1, 0, 0, 1}, CVec{0, 1, 0, 0}, kGrid);
  CHECK(p.verdict == Verdict::Fail);
  // ||I + it E12||^2 = (|t|/2 + sqrt(1 + t^2/4))^2 exceeds 1 + t^2 for t != 0.
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    const double t = kGrid[k];
    const double exact = std::pow(t / 2 + std::sqrt(1 + t * t / 4), 2);
    const double oracle_norm = oracle::norm(CMat::identity(2) + E(0, 1) * cplx(0, t));
    CHECK(exact == doctest::Approx(oracle_norm * oracle_norm).epsilon(1e-12));
    CHECK(p.scalar_slack_pos[k] == doctest::Approx(1 + t * t - exact).epsilon(1e-9));
  }
}

TEST_CASE("the flip matrix meets the scalar criterion with equality") {
  const auto s = m2();
  const HermitianProfile p = is_u_hermitian(s, CVec{1, 0, 0, 1}, CVec{0, 1, 1, 0}, kGrid);
  CHECK(p.verdict == Verdict::Pass);
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    CHECK(std::abs(p.scalar_slack_pos[k]) <= 1e-8);
    CHECK(std::abs(p.scalar_slack_neg[k]) <= 1e-8);
  }
}

TEST_CASE("u-positivity") {
  const auto s = m2();
  const CVec u{1, 0, 0, 1};
  CHECK(is_u_positive(s, u, u, kGrid).passed());
  CHECK(is_u_positive(s, u, CVec{-1, 0, 0, -1}, kGrid).verdict == Verdict::Fail);
  CHECK(is_u_positive(s, u, CVec{1, 0, 0, 0.5}, kGrid).passed());
}

TEST_CASE("hermitian spans") {
  const auto s3 = sym3();
  const TroClosure c3 = generate_tro(s3);
  const DeltaSpan d3 = delta_span(s3, CVec{1, 0, 0}, &c3, kGrid);
  CHECK(d3.ambient_route);
  CHECK(d3.hermitian_basis.size() == 3);
  CHECK(d3.complex_basis.size() == 3);

  const auto up = upper();
  const TroClosure cu = generate_tro(up);
  const DeltaSpan du = delta_span(up, CVec{1, 0}, &cu, kGrid);
  CHECK(du.hermitian_basis.size() == 1);
  CHECK(du.complex_basis.size() == 1);

  const CatalogEntry circle = catalog("circle-1zzbar", 360);
  const TroClosure cc = generate_tro(circle.space, true);
  CHECK(delta_span(circle.space, CVec{0, 1, 0}, &cc, kGrid).hermitian_basis.size() == 1);
}

TEST_CASE("intrinsic route finds the same hermitians on small spaces") {
  const auto s3 = sym3();
  const DeltaSpan d = delta_span(s3, CVec{1, 0, 0}, nullptr, kGrid);
  CHECK_FALSE(d.ambient_route);
  CHECK(d.hermitian_basis.size() == 3);
  const auto up = upper();
  CHECK(delta_span(up, CVec{1, 0}, nullptr, kGrid).hermitian_basis.size() == 1);
}

TEST_CASE("operator system check") {
  const auto s = m2();
  const TroClosure c = generate_tro(s, true);
  CHECK(operator_system_check(s, CVec{1, 0, 0, 1}, &c, kGrid).passed());
  const auto up = upper();
  const TroClosure cu = generate_tro(up);
  CHECK(operator_system_check(up, CVec{1, 0}, &cu, kGrid).verdict == Verdict::Fail);
  const CatalogEntry circle = catalog("circle-1zzbar", 360);
  const TroClosure cc = generate_tro(circle.space, true);
  CHECK(operator_system_check(circle.space, CVec{0, 1, 0}, &cc, kGrid).verdict == Verdict::Fail);
}

TEST_CASE("hermitian ball elements have nonnegative slack and scalar equality") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto s = m2();
  const CVec u{1, 0, 0, 1};
  const TroClosure c = generate_tro(s, true);
  const DeltaSpan d = delta_span(s, u, &c, kGrid);
  for (int k = 0; k < 10; ++k) {
    CVec x(4);
    for (const auto& h : d.hermitian_basis) {
      const double a = g(rng);
      for (std::size_t i = 0; i < 4; ++i) x[i] += a * h[i];
    }
    const double n = s.norm(x);
    for (auto& z : x) z /= n;
    const HermitianProfile p = is_u_hermitian(s, u, x, kGrid);
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
      CHECK(p.matricial_slack[i] >= -1e-8);
      CHECK(std::abs(p.scalar_slack_pos[i]) <= 1e-8);
    }
    // Positivity in the ball: hermitian and ||u - x|| <= 1, matching the eigenvalue oracle.
    const bool psd = oracle::min_eigenvalue(s.embed(x)) >= -1e-9;
    CHECK(is_u_positive(s, u, x, kGrid).passed() == psd);
  }
}

TEST_CASE("compressions keep hermitians hermitian") {
  // x -> p x p with p = E11 maps M2 into span{E11}; the image of a hermitian is hermitian for T(u) = E11.
  const auto s = m2();
  const auto corner = ConcreteOpSpace::make({E(0, 0)}, CVec{1});
  const CVec x{0.3, cplx(0.2, 0.1), cplx(0.2, -0.1), -0.5};
  const CMat px = E(0, 0) * s.embed(x) * E(0, 0);
  const CVec image = corner.membership_dense(px).coeffs;
  CHECK(is_u_hermitian(corner, CVec{1}, image, kGrid).verdict == Verdict::Pass);
}
