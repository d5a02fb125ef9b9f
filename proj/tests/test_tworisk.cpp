#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tssa/oracle.hpp"
#include "tssa/sweep.hpp"
#include "tssa/tworisk.hpp"
#include "test_util.hpp"

using namespace tssa;
using model::Params;
using testutil::rel_close;
using testutil::worked_params;

TEST_CASE("nondimensionalize") {
  model::DimParams d;
  d.beta = 0.3;
  d.gamma = 0.09;
  d.delta = 0.01;
  d.eta = 0.2;
  d.mu = 1e-4;
  d.Psi = 0.0;
  d.Omega = 0.0;
  d.sigma = 0.5;
  d.f = 1.0;
  const Params p = model::nondimensionalize(d);
  CHECK(p.epsilon == doctest::Approx(1e-4 / 0.1001));
  CHECK(p.b == doctest::Approx(0.3 / 0.1001));
  CHECK(p.m == doctest::Approx(0.01 / 0.1001));
  CHECK(p.rho == doctest::Approx(0.2 / 0.1001));
  CHECK(p.psi == 0.0);
  CHECK(p.omega == 0.0);

  d.delta = 0.0;  // no disease mortality -> m = 0
  CHECK(model::nondimensionalize(d).m == 0.0);

  d.Psi = d.Omega = 0.0;
  CHECK(model::nondimensionalize(d).Sigma == 0.0);
  CHECK(model::nondimensionalize(d).Sigma_bar() == 1.0);

  d.mu = 0.0;
  CHECK_THROWS_AS(model::nondimensionalize(d), std::invalid_argument);
}

TEST_CASE("Params validation and derived quantities") {
  CHECK_THROWS_AS(Params::from_dimensionless(0.0, 2, 0, 1, 0, 0, 0.5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Params::from_dimensionless(1e-3, 2, 1.0, 1, 0, 0, 0.5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Params::from_dimensionless(1e-3, 2, 0, 1, 0, 0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Params::from_dimensionless(1e-3, 2, 0, 1, 0, 0, 0.5, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(Params::from_dimensionless(1e-3, 2, 0, 1, -1, 0, 0.5, 1),
                  std::invalid_argument);
  CHECK(Params::from_dimensionless(0.5, 2, 0, 1, 0, 0, 0.5, 1).asymptotic_regime() == false);

  SplitMix64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    sweep::Ranges r;
    r.b_lo = 0.2;  // allow R0 < 1 too
    const Params p = sweep::sample_params(r, rng);
    CHECK(p.kappa + p.h == p.b);  // exact by construction
    // sign(c) = sign(R0 - 1)
    if (p.c > 0.0) CHECK(p.R0 > 1.0);
    if (p.c < 0.0) CHECK(p.R0 < 1.0);
  }
}

TEST_CASE("r0 and c") {
  // sigma = 1: protection indistinguishable, R0 = b.
  const Params sig1 = Params::from_dimensionless(1e-3, 1.7, 0.1, 1, 2, 3, 1.0, 0.5);
  CHECK(model::r0(sig1) == doctest::Approx(1.7));

  // f = 1, psi = omega = 0: everyone unprotected, R0 = h + kappa = b.
  const Params unprot = Params::from_dimensionless(1e-3, 1.7, 0.1, 1, 0, 0, 0.3, 1.0);
  CHECK(model::r0(unprot) == doctest::Approx(1.7));

  const Params wp = worked_params();
  CHECK(model::r0(wp) == doctest::Approx(2.0));
  CHECK(model::bifurcation_c(wp) == doctest::Approx(1.0));
}

TEST_CASE("disease-free equilibrium") {
  const Params wp = worked_params();
  const auto s = model::dfe(wp);
  CHECK(s.U == doctest::Approx(1.0));
  CHECK(s.S == 1.0);
  CHECK(s.N == 1.0);
  CHECK(s.X == 0.0);
  CHECK(s.Y == 0.0);

  // No route into the unprotected class.
  const Params closed = Params::from_dimensionless(1e-3, 2, 0, 1, 0, 2.0, 0.5, 0.0);
  CHECK(model::dfe(closed).U == 0.0);

  // psi -> infinity pushes everyone unprotected.
  const Params fast_swap = Params::from_dimensionless(1e-3, 2, 0, 1, 1e3, 0, 0.5, 0.0);
  CHECK(model::dfe(fast_swap).U == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("dfe_stability") {
  CHECK(model::dfe_stability(worked_params(), 1e-3).state == Stability::Unstable);

  const Params sub = Params::from_dimensionless(1e-3, 0.5, 0, 1, 0, 0, 0.5, 1.0);
  CHECK(model::dfe_stability(sub, 1e-3).state == Stability::Stable);

  // Bisect b to the numeric stability boundary; the verdict there is
  // Indeterminate within the 1e-8 margin.
  auto max_re_at = [](double b) {
    const Params p = Params::from_dimensionless(1e-3, b, 0, 1, 0, 0, 0.5, 1.0);
    return -model::dfe_stability(p, 1e-3).margin;
  };
  double lo = 0.5, hi = 2.0;
  REQUIRE(max_re_at(lo) < 0.0);
  REQUIRE(max_re_at(hi) > 0.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (max_re_at(mid) < 0.0 ? lo : hi) = mid;
  }
  const Params boundary = Params::from_dimensionless(1e-3, 0.5 * (lo + hi), 0, 1, 0, 0, 0.5, 1.0);
  CHECK(model::dfe_stability(boundary, 1e-3).state == Stability::Indeterminate);
}

TEST_CASE("ede_quadratic") {
  const Params wp = worked_params();
  const auto g = model::ede_quadratic(wp);
  CHECK(g.a2 == doctest::Approx(0.5));
  CHECK(g.a1 == doctest::Approx(0.5));
  CHECK(g.a0 == doctest::Approx(-1.0));
  // Roots z = 1 and z = -2.
  CHECK(g.eval(1.0) == doctest::Approx(0.0));
  CHECK(g.eval(-2.0) == doctest::Approx(0.0));

  SplitMix64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    sweep::Ranges r;
    r.b_lo = 0.2;
    const Params p = sweep::sample_params(r, rng);
    CHECK(model::ede_quadratic(p).a0 == doctest::Approx(-p.c));  // G(0) = -c
  }

  // sigma = 1: the (1-sigma) terms vanish from the middle coefficient.
  const Params s1 = Params::from_dimensionless(1e-3, 2.0, 0.3, 1, 1.0, 0.5, 1.0, 0.7);
  const auto g1 = model::ede_quadratic(s1);
  CHECK(g1.a1 ==
        doctest::Approx((1.0 - s1.kappa) + (1.0 - s1.m) * s1.Sigma_bar()));
}

TEST_CASE("solve_ede at the worked point") {
  const Params wp = worked_params();
  const auto edes = model::solve_ede(wp);
  REQUIRE(edes.size() == 1);
  const auto& e = edes[0];
  CHECK(e.z == doctest::Approx(1.0));
  CHECK(e.y == doctest::Approx(0.5));
  CHECK(e.s == doctest::Approx(0.5));
  CHECK(e.N == doctest::Approx(1.0));
  CHECK(e.u == doctest::Approx(0.5));
  CHECK(e.p == doctest::Approx(0.0));
  CHECK(e.q == doctest::Approx(0.5));
  // hu = 1 - kappa + (1-m) sigma z = 0.5
  CHECK(wp.h * e.u == doctest::Approx(0.5));
}

TEST_CASE("solve_ede empty cases") {
  SplitMix64 rng(17);
  // c < 0 with m <= 0.75: no admissible equilibria (Prop 1).
  int found_c_neg = 0;
  for (int trial = 0; trial < 3000 && found_c_neg < 500; ++trial) {
    sweep::Ranges r;
    r.b_lo = 0.2;
    r.b_hi = 5.0;
    const Params p = sweep::sample_params(r, rng);
    if (p.c > 0.0) continue;
    ++found_c_neg;
    CHECK(model::solve_ede(p).empty());
  }
  CHECK(found_c_neg >= 500);

  // b < 1 and c < 0: z_hat < 0 excludes every positive root.
  const Params sub = Params::from_dimensionless(1e-3, 0.5, 0.2, 1, 0, 0, 0.5, 1.0);
  REQUIRE(sub.c < 0.0);
  CHECK(model::z_hat(sub) < 0.0);
  CHECK(model::solve_ede(sub).empty());
}

TEST_CASE("EdeState identities on sampled parameters") {
  SplitMix64 rng(1010);
  int checked = 0;
  for (int trial = 0; trial < 4000 && checked < 1000; ++trial) {
    sweep::Ranges r;
    const Params p = sweep::sample_params(r, rng);
    if (p.c <= 0.0) continue;
    const auto edes = model::solve_ede(p);
    REQUIRE(edes.size() == 1);
    const auto& e = edes[0];
    ++checked;
    const auto g = model::ede_quadratic(p);
    CHECK(std::abs(g.eval(e.z)) <= 1e-9 * g.max_abs_coeff());
    CHECK(std::abs(p.b * e.q - 1.0) <= 1e-9);
    CHECK(e.u <= e.q + 1e-12);
    CHECK(e.q <= e.s + 1e-12);
    CHECK(e.p >= -1e-9);
    CHECK(e.s <= 1.0);
    CHECK(e.z <= model::z_hat(p) + 1e-9);
    // hu and hp identities
    CHECK(rel_close(p.h * e.u, 1.0 - p.kappa + (1.0 - p.m) * p.sigma * e.z, 1e-9, 1e-9));
    CHECK(rel_close(p.h * e.p, p.b * e.s - 1.0, 1e-9, 1e-9));
    // 1/N = 1 + m y
    CHECK(rel_close(1.0 / e.N, 1.0 + p.m * e.y, 1e-12, 1e-12));
  }
  CHECK(checked == 1000);
}

TEST_CASE("jacobian_gamma at the worked point") {
  const Params wp = worked_params();
  const auto e = model::solve_ede(wp).at(0);
  const auto j = model::jacobian_gamma(wp, e);

  // Row 5 is (0, -m, 0, 0, -1) = (0, 0, 0, 0, -1) at m = 0.
  CHECK(j.at(4, 0).is_zero());
  CHECK(j.at(4, 1).is_zero());
  CHECK(j.at(4, 2).is_zero());
  CHECK(j.at(4, 3).is_zero());
  CHECK(j.at(4, 4).coeff(0) == doctest::Approx(-1.0));

  // Trace = -(2G + 5.5), so c1 = 2G + 5.5.
  const GammaPoly tr = j.trace();
  CHECK(tr.coeff(1) == doctest::Approx(-2.0));
  CHECK(tr.coeff(0) == doctest::Approx(-5.5));
  const GammaPoly c1 = charpoly_minors(j).c(1);
  CHECK(c1.coeff(1) == doctest::Approx(2.0));
  CHECK(c1.coeff(0) == doctest::Approx(5.5));

  // J12 principal 2x2 minor: the G^2 terms cancel exactly, leaving G.
  SquareMatrix<GammaPoly> fast(2);
  fast.at(0, 0) = j.at(0, 0);
  fast.at(0, 1) = j.at(0, 1);
  fast.at(1, 0) = j.at(1, 0);
  fast.at(1, 1) = j.at(1, 1);
  const GammaPoly minor = det(fast);
  CHECK(minor.degree() == 1);
  CHECK(minor.coeff(1) == doctest::Approx(1.0));

  // Spot checks on the printed entries.
  CHECK(j.at(0, 2).coeff(1) == doctest::Approx(e.v));
  CHECK(j.at(2, 2).coeff(0) == doctest::Approx(-1.5));  // -(1+v)
  CHECK(j.at(3, 3).coeff(0) == doctest::Approx(-2.0));  // -(1+w)
  CHECK(j.at(3, 1).coeff(0) == doctest::Approx(-1.0));  // -b u
  CHECK(j.at(3, 4).coeff(0) == doctest::Approx(0.5));   // u z
}

TEST_CASE("leading_charpoly") {
  const Params wp = worked_params();
  const auto e = model::solve_ede(wp).at(0);
  const auto lc = model::leading_charpoly(wp, e);
  const std::array<double, 5> expect{2.0, 10.0, 1.0, 2.5, 1.5};
  for (int i = 0; i < 5; ++i) {
    CHECK(lc.k[i] == doctest::Approx(expect[i]));
    CHECK(lc.p[i] == ((i < 2) ? 1 : 2));
  }
  CHECK(lc.k[3] - lc.k[2] - lc.k[4] == 0.0);  // k4 = k3 + k5 exactly
  CHECK(lc.max_rel_dev <= 1e-9);

  // m = kappa with psi = 0: A = b h u > 0.
  const Params edge = Params::from_dimensionless(1e-3, 2.0, 0.5, 1.0, 0.0, 1.0, 0.25, 1.0);
  REQUIRE(edge.kappa == doctest::Approx(edge.m));
  for (const auto& ee : model::solve_ede(edge)) {
    const auto sc = model::stability_conditions(edge, ee);
    CHECK(sc.A == doctest::Approx(edge.b * edge.h * ee.u));
    CHECK(sc.A > 0.0);
  }

  // Closed forms agree with the minors path across samples.
  SplitMix64 rng(2025);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 400; ++trial) {
    sweep::Ranges r;
    const Params p = sweep::sample_params(r, rng);
    if (p.c <= 0.0) continue;
    const auto edes = model::solve_ede(p);
    if (edes.empty()) continue;
    ++checked;
    CHECK(model::leading_charpoly(p, edes[0]).max_rel_dev <= 1e-9);
  }
  CHECK(checked == 400);
}

TEST_CASE("stability_conditions at the worked point") {
  const Params wp = worked_params();
  const auto e = model::solve_ede(wp).at(0);
  const auto sc = model::stability_conditions(wp, e);
  CHECK(sc.A == doctest::Approx(2.0));
  CHECK(sc.B == doctest::Approx(3.0));
  CHECK(sc.C == doctest::Approx(18.0));
  CHECK(sc.q1 == doctest::Approx(19.0));
  CHECK(sc.q2 == doctest::Approx(9.0));
  CHECK(rel_close(wp.rho * e.y * sc.C, sc.q2, 1e-9));
  CHECK(sc.verdict.state == Stability::Stable);
}

TEST_CASE("rho y C = q2 identity across samples") {
  SplitMix64 rng(31415);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 500; ++trial) {
    sweep::Ranges r;
    const Params p = sweep::sample_params(r, rng);
    if (p.c <= 0.0) continue;
    for (const auto& e : model::solve_ede(p)) {
      const auto sc = model::stability_conditions(p, e);
      CHECK(rel_close(p.rho * e.y * sc.C, sc.q2, 1e-9, 1e-12));
      ++checked;
    }
  }
  CHECK(checked >= 500);
}

TEST_CASE("m <= 0.75 region is stable (Prop 4 sweep)") {
  SplitMix64 rng(555);
  int checked = 0;
  for (int trial = 0; trial < 3000 && checked < 1000; ++trial) {
    sweep::Ranges r;  // m in [0, 0.75]
    const Params p = sweep::sample_params(r, rng);
    if (p.R0 <= 1.0) continue;
    for (const auto& e : model::solve_ede(p)) {
      const auto sc = model::stability_conditions(p, e);
      CHECK(sc.A > 0.0);
      CHECK(sc.B > 0.0);
      CHECK(sc.C > 0.0);
      ++checked;
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("backward bifurcation: lower branch unstable, upper branch stable") {
  const auto found = sweep::find_backward_bifurcation();
  REQUIRE(found.has_value());
  const auto& inst = *found;
  REQUIRE(inst.edes.size() == 2);
  CHECK(inst.params.c <= 0.0);
  CHECK(inst.params.m > 0.75);
  CHECK(inst.params.m > inst.params.kappa);

  const auto lower = model::stability_conditions(inst.params, inst.edes[0]);
  const auto upper = model::stability_conditions(inst.params, inst.edes[1]);
  CHECK(std::min({lower.A, lower.B, lower.C}) <= 0.0);
  CHECK(lower.verdict.state == Stability::Unstable);
  CHECK(upper.A > 0.0);
  CHECK(upper.B > 0.0);
  CHECK(upper.C > 0.0);
  CHECK(upper.verdict.state == Stability::Stable);

  // The numeric oracle agrees on both branches.
  const auto rep = model::check_prop4(inst.params, 1e-4);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& entry : rep.entries) {
    CHECK(entry.numeric_ok);
    CHECK(entry.agree);
  }

  // Both branches sit close to the fold: verify flags them near-margin.
  const auto rows = sweep::verify_point(inst.params, {1e-4});
  int flagged = 0;
  for (const auto& row : rows)
    if (row.equilibrium >= 0 && row.near_margin) ++flagged;
  CHECK(flagged >= 1);
}

TEST_CASE("check_prop1") {
  // Applicable + satisfied on a c <= 0 sweep at moderate m.
  SplitMix64 rng(8080);
  int applicable = 0;
  for (int trial = 0; trial < 4000 && applicable < 1000; ++trial) {
    sweep::Ranges r;
    r.b_lo = 0.2;
    r.b_hi = 5.0;
    r.m_lo = 0.5;
    r.m_hi = 0.5;  // fixed m = 0.5
    const Params p = sweep::sample_params(r, rng);
    const auto rep = model::check_prop1(p);
    if (!rep.applicable) continue;
    ++applicable;
    CHECK(rep.n_ede == 0);
    CHECK(!rep.violated);
  }
  CHECK(applicable >= 1000);

  // m exactly 0.75: the bound m > 3/4 is strict, so no instance exists.
  for (int trial = 0; trial < 2000; ++trial) {
    sweep::Ranges r;
    r.b_lo = 0.2;
    r.b_hi = 5.0;
    r.m_lo = 0.75;
    r.m_hi = 0.75;
    const Params p = sweep::sample_params(r, rng);
    const auto rep = model::check_prop1(p);
    if (rep.applicable) CHECK(rep.n_ede == 0);
  }

  // Not applicable when c > 0.
  CHECK(!model::check_prop1(worked_params()).applicable);
}

TEST_CASE("check_prop4 at the worked point") {
  const auto rep = model::check_prop4(worked_params(), 1e-3);
  REQUIRE(rep.applicable);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.abc_all_positive);
  CHECK(rep.entries[0].cond.verdict.state == Stability::Stable);
  CHECK(rep.entries[0].numeric_ok);
  CHECK(rep.entries[0].num_max_re < 0.0);
  CHECK(rep.entries[0].agree);
}
