#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tssa/gamma_poly.hpp"
#include "test_util.hpp"

using namespace tssa;
using testutil::rel_close;

namespace {

bool poly_close(const GammaPoly& a, const GammaPoly& b, double rel) {
  const int d = std::max(a.degree(), b.degree());
  for (int p = 0; p <= d; ++p)
    if (!rel_close(a.coeff(p), b.coeff(p), rel, 1e-15)) return false;
  return true;
}

}  // namespace

TEST_CASE("gp_add examples") {
  const GammaPoly g = GammaPoly::term(1.0, 1);

  CHECK(gp_add(g, -g).is_zero());

  // (rho G^2 + G) + (-rho G^2) with rho = 1: the G^2 terms cancel exactly.
  const GammaPoly a = GammaPoly::term(1.0, 2) + g;
  const GammaPoly sum = gp_add(a, -GammaPoly::term(1.0, 2));
  CHECK(sum.degree() == 1);
  CHECK(sum.coeff(1) == doctest::Approx(1.0));

  const GammaPoly c = gp_add(GammaPoly::term(2.0, 1), GammaPoly(3.0));
  CHECK(c.coeff(1) == doctest::Approx(2.0));
  CHECK(c.coeff(0) == doctest::Approx(3.0));
}

TEST_CASE("gp_mul examples") {
  const GammaPoly g = GammaPoly::term(1.0, 1);
  CHECK(gp_mul(g, g).leading().p == 2);

  const GammaPoly a = GammaPoly::term(1.0, 1) + GammaPoly(1.0);  // rho G + 1, rho = 1
  const GammaPoly prod = gp_mul(a, g);
  CHECK(prod.coeff(2) == doctest::Approx(1.0));
  CHECK(prod.coeff(1) == doctest::Approx(1.0));
  CHECK(prod.coeff(0) == 0.0);

  const GammaPoly c1 = GammaPoly::term(2.0, 1) + GammaPoly(5.5);
  CHECK(gp_mul(c1, GammaPoly()).is_zero());
}

TEST_CASE("leading") {
  const GammaPoly c1 = GammaPoly::term(2.0, 1) + GammaPoly(5.5);
  LeadingTerm lt = leading(c1);
  CHECK(lt.k == doctest::Approx(2.0));
  CHECK(lt.p == 1);

  // rho G^2 + G - rho G^2 leaves (1, 1).
  GammaPoly a = GammaPoly::term(1.0, 2) + GammaPoly::term(1.0, 1);
  a -= GammaPoly::term(1.0, 2);
  lt = leading(a);
  CHECK(lt.k == doctest::Approx(1.0));
  CHECK(lt.p == 1);

  lt = leading(GammaPoly());
  CHECK(lt.is_zero());
  CHECK(lt.p == 0);
}

TEST_CASE("cancellation pruning distinguishes dust from genuine coefficients") {
  // Structural cancellation with float dust: (1/3) G - (1/3) G.
  const GammaPoly third = GammaPoly::term(1.0 / 3.0, 1);
  CHECK((third - third).is_zero());

  // A genuinely small term survives when nothing cancels against it.
  const GammaPoly small = GammaPoly::term(1e-12, 1) + GammaPoly(1.0);
  CHECK(small.coeff(1) == doctest::Approx(1e-12));
  CHECK(small.degree() == 1);
}

TEST_CASE("ring laws on random polynomials") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const GammaPoly a = testutil::random_gamma_poly(rng);
    const GammaPoly b = testutil::random_gamma_poly(rng);
    const GammaPoly c = testutil::random_gamma_poly(rng);
    CHECK(poly_close((a + b) + c, a + (b + c), 1e-12));
    CHECK(poly_close(a * b, b * a, 1e-12));
    CHECK(poly_close(a * (b + c), a * b + a * c, 1e-12));
  }
}

TEST_CASE("substitution homomorphism") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const GammaPoly a = testutil::random_gamma_poly(rng);
    const GammaPoly b = testutil::random_gamma_poly(rng);
    for (double g0 : {1e2, 1e3, 1e4}) {
      const double lhs = gp_mul(a, b).eval(g0);
      const double rhs = a.eval(g0) * b.eval(g0);
      CHECK(rel_close(lhs, rhs, 1e-9, 1e-12));
    }
  }
}

TEST_CASE("leading is invariant under lower-degree perturbations") {
  SplitMix64 rng(512);
  for (int trial = 0; trial < 300; ++trial) {
    GammaPoly a = testutil::random_gamma_poly(rng, 3);
    if (a.is_zero()) continue;
    const LeadingTerm before = a.leading();
    GammaPoly lower;
    for (int p = 0; p < before.p; ++p) lower += GammaPoly::term(rng.uniform(-5.0, 5.0), p);
    const LeadingTerm after = (a + lower).leading();
    CHECK(after.p == before.p);
    CHECK(after.k == doctest::Approx(before.k));
  }
}

TEST_CASE("asymptotic division") {
  // Exact case: (G^2 + 3G + 2) / (G + 1) = G + 2.
  const GammaPoly g = GammaPoly::term(1.0, 1);
  const GammaPoly num = (g + GammaPoly(1.0)) * (g + GammaPoly(2.0));
  const GammaPoly q = gp_div_asymptotic(num, g + GammaPoly(1.0));
  CHECK(q.coeff(1) == doctest::Approx(1.0));
  CHECK(q.coeff(0) == doctest::Approx(2.0));

  // Monomial divisor: terms that would go to negative powers are dropped.
  const GammaPoly r = gp_div_asymptotic(GammaPoly::term(4.0, 2) + GammaPoly(7.0), g);
  CHECK(r.degree() == 1);
  CHECK(r.coeff(1) == doctest::Approx(4.0));

  CHECK_THROWS_AS(gp_div_asymptotic(g, GammaPoly()), std::invalid_argument);
}

TEST_CASE("text form and parser") {
  const GammaPoly c1 = GammaPoly::term(2.0, 1) + GammaPoly(5.5);
  CHECK(to_text(c1) == "2*G + 5.5");
  CHECK(to_text(GammaPoly()) == "0");

  CHECK(poly_close(parse_gamma_poly("1+2*G^2"), GammaPoly::term(2.0, 2) + GammaPoly(1.0), 0.0));
  CHECK(poly_close(parse_gamma_poly("-3*G"), GammaPoly::term(-3.0, 1), 0.0));
  CHECK(poly_close(parse_gamma_poly("4"), GammaPoly(4.0), 0.0));
  CHECK(poly_close(parse_gamma_poly("G^2 - 1e-2"),
                   GammaPoly::term(1.0, 2) + GammaPoly(-1e-2), 0.0));
  CHECK(poly_close(parse_gamma_poly(" -G "), GammaPoly::term(-1.0, 1), 0.0));

  CHECK_THROWS_AS(parse_gamma_poly("2**G"), std::invalid_argument);
  CHECK_THROWS_AS(parse_gamma_poly("G^-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_gamma_poly(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_gamma_poly("x+1"), std::invalid_argument);

  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const GammaPoly a = testutil::random_gamma_poly(rng, 4);
    CHECK(poly_close(parse_gamma_poly(to_text(a)), a, 0.0));
  }
}

TEST_CASE("negative exponents are rejected") {
  CHECK_THROWS_AS(GammaPoly::term(1.0, -1), std::invalid_argument);
}
