#include <random>

#include "doctest.h"
#include "opcert/errors.hpp"
#include "opcert/funcspace.hpp"
#include "opcert/tro.hpp"
#include "oracle.hpp"

using namespace opcert;

namespace {

CMat E(std::size_t i, std::size_t j) { return CMat::unit(2, 2, i, j); }
ConcreteOpSpace m2() { return ConcreteOpSpace::make({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}, CVec{1, 0, 0, 1}); }
ConcreteOpSpace sym3() { return ConcreteOpSpace::make({CMat::identity(2), E(0, 1), E(1, 0)}, CVec{1, 0, 0}); }
ConcreteOpSpace upper() { return ConcreteOpSpace::make({CMat::identity(2), E(0, 1)}, CVec{1, 0}); }

double ternary_residual(const TroClosure& c) {
  const Ambient& amb = c.ambient();
  double worst = 0.0;
  for (const auto& a : c.z_basis)
    for (const auto& b : c.z_basis)
      for (const auto& d : c.z_basis) worst = std::max(worst, c.z_residual(amb.triple(a, b, d)));
  return worst;
}

}  // namespace

TEST_CASE("generated TRO dimensions") {
  CHECK(generate_tro(m2()).z_basis.size() == 4);
  CHECK(generate_tro(sym3()).z_basis.size() == 4);
  CHECK(generate_tro(ConcreteOpSpace::make({E(0, 1)})).z_basis.size() == 1);
}

TEST_CASE("generated TRO is ternary closed, contains X, and is idempotent") {
  for (const auto& s : {m2(), sym3(), upper()}) {
    const TroClosure c = generate_tro(s);
    CHECK(ternary_residual(c) <= 1e-8);
    for (const auto& b : s.basis()) CHECK(c.z_residual(b) <= 1e-10);
    const TroClosure again = generate_tro(ConcreteOpSpace::make(c.z_basis));
    CHECK(again.z_basis.size() == c.z_basis.size());
  }
}

TEST_CASE("diagonal partition algorithm agrees with the generic closure") {
  const CatalogEntry e = catalog("circle-1z", 24);
  const TroClosure fast = generate_tro(e.space);
  const TroClosure slow = generate_tro_generic(e.space);
  CHECK(fast.z_basis.size() == slow.z_basis.size());
  CHECK(fast.z_basis.size() == 24);
}

TEST_CASE("ambient unitary check") {
  const TroClosure c = generate_tro(m2());
  const CertificateReport id = ambient_unitary_check(c, CVec{1, 0, 0, 1});
  CHECK(id.passed());
  CHECK(id.margin <= 1e-14);
  const CertificateReport e11 = ambient_unitary_check(c, CVec{1, 0, 0, 0});
  CHECK(e11.verdict == Verdict::Fail);
  CHECK(e11.margin == doctest::Approx(1.0).epsilon(1e-12));
  const double th = 0.7;
  const CertificateReport rot = ambient_unitary_check(c, CVec{std::cos(th), -std::sin(th), std::sin(th), std::cos(th)});
  CHECK(rot.passed());
}

TEST_CASE("involution") {
  const TroClosure c = generate_tro(m2());
  const CVec u{1, 0, 0, 1};
  CHECK(frobenius_norm(involution(c, u, u) - CMat::identity(2)) < 1e-14);
  CHECK(frobenius_norm(involution(c, u, CVec{0, 1, 0, 0}) - E(1, 0)) < 1e-14);
  CHECK_THROWS_AS(involution(c, CVec{1, 0, 0, 0}, u), PreconditionError);

  // Two-point function model with u = (1, -1): the involution is entrywise conjugation.
  const auto two = ConcreteOpSpace::make_diagonal(2, {CVec{1, 0}, CVec{0, 1}}, CVec{1, -1});
  const TroClosure tc = generate_tro(two, true);
  const CMat iota = involution(tc, CVec{1, -1}, CVec{cplx(1, 2), cplx(-3, 1)});
  CHECK(std::abs(iota(0, 0) - cplx(1, -2)) < 1e-14);
  CHECK(std::abs(iota(1, 0) - cplx(-3, -1)) < 1e-14);
}

TEST_CASE("involution is conjugate linear, isometric and of period two") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto s = m2();
  const TroClosure c = generate_tro(s);
  for (int k = 0; k < 20; ++k) {
    const CMat um = oracle::random_unitary(2, rng);
    const CVec u = oracle::m2_coeffs(um);
    CVec x(4);
    for (auto& z : x) z = cplx(g(rng), g(rng));
    const CMat ix = involution(c, u, x);
    CHECK(spectral_norm(ix) == doctest::Approx(s.norm(x)).epsilon(1e-10));
    const CMat iix = involution(c, u, s.membership(ix).coeffs);
    CHECK(frobenius_norm(iix - s.embed(x)) <= 1e-8);
    const cplx a(g(rng), g(rng));
    CVec ax = x;
    for (auto& z : ax) z *= a;
    CHECK(frobenius_norm(involution(c, u, ax) - ix * std::conj(a)) <= 1e-10);
  }
}

TEST_CASE("ambient system check") {
  CHECK(ambient_system_check(generate_tro(sym3()), CVec{1, 0, 0}).passed());
  const CertificateReport up = ambient_system_check(generate_tro(upper()), CVec{1, 0});
  CHECK(up.verdict == Verdict::Fail);
  CHECK(up.margin == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(42);
  const TroClosure c = generate_tro(m2());
  for (int k = 0; k < 5; ++k) CHECK(ambient_system_check(c, oracle::m2_coeffs(oracle::random_unitary(2, rng))).passed());
}

TEST_CASE("same involution and transfer checks") {
  const TroClosure c = generate_tro(m2());
  const CVec u{1, 0, 0, 1};
  CHECK(same_involution_check(c, u, u).passed());
  CHECK(same_involution_check(c, u, CVec{-1, 0, 0, -1}).passed());
  CHECK(transfer_check(c, u, u).passed());
  std::mt19937_64 rng(43);
  CHECK(transfer_check(c, oracle::m2_coeffs(oracle::random_unitary(2, rng)),
                       oracle::m2_coeffs(oracle::random_unitary(2, rng)))
            .passed());

  const CatalogEntry two = catalog("two-circles", 90);
  const TroClosure tc = generate_tro(two.space, true);
  CHECK(same_involution_check(tc, CVec{1, 0, 0, 0}, CVec{0, 1, 0, 0}).passed());

  const CatalogEntry circle = catalog("circle-1zzbar", 90);
  const TroClosure cc = generate_tro(circle.space, true);
  CHECK(transfer_check(cc, CVec{1, 0, 0}, CVec{0, 1, 0}).verdict == Verdict::Fail);
}
