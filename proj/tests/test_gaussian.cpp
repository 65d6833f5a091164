#include <catch2/catch_amalgamated.hpp>

#include "catmech/gaussian.hpp"
#include "catmech/lyapunov.hpp"

using namespace catmech;
using Catch::Approx;

TEST_CASE("squeezed thermal moments") {
  const auto vac = squeezed_thermal_moments({0.0, pi, 0.0});
  CHECK(vac.a == 1.0);
  CHECK(vac.b == 1.0);

  const auto sq = squeezed_thermal_moments({1.1, pi, 0.0});
  CHECK(sq.a == Approx(std::exp(-2.2)).epsilon(1e-14));
  CHECK(sq.b == Approx(std::exp(2.2)).epsilon(1e-14));
  CHECK(sq.a == Approx(0.1108).margin(2e-4));
  CHECK(sq.b == Approx(9.025).margin(2e-3));
  CHECK(sq.pure());

  const auto th = squeezed_thermal_moments({0.0, pi, 3.5});
  CHECK(th.a == Approx(8.0).epsilon(1e-14));
  CHECK(th.b == Approx(8.0).epsilon(1e-14));

  const auto z = squeezed_thermal_moments({0.7, 0.0, 0.2});
  CHECK(z.a == Approx(1.4 * std::exp(1.4)).epsilon(1e-14));
  CHECK(z.b == Approx(1.4 * std::exp(-1.4)).epsilon(1e-14));

  CHECK_THROWS_AS(squeezed_thermal_moments({0.5, 1.0, 0.0}), config_error);
  CHECK_THROWS_AS(squeezed_thermal_moments({-0.5, 0.0, 0.0}), config_error);
}

TEST_CASE("uncertainty bound holds for every constructed state") {
  for (double r = 0.0; r <= 1.5; r += 0.3) {
    for (double nb : {0.0, 0.3, 2.0}) {
      const auto m = squeezed_thermal_moments({r, pi, nb});
      CHECK(m.a * m.b >= 1.0 - 1e-12);
      if (nb == 0.0) CHECK(m.a * m.b == Approx(1.0).epsilon(1e-12));
      if (nb > 0.0) CHECK(m.a * m.b > 1.0 + 1e-6);
    }
  }
}

TEST_CASE("steady-state squeezing closed form") {
  SECTION("no blue drive: pure cooling") {
    const auto s = steady_state_squeezing(1e6, 0.0, 1e9, 1e4, 2.0);
    CHECK(s.r == 0.0);
    CHECK(s.phi == pi);
    CHECK(s.nbar > 0.0);
    CHECK(s.nbar < 2.0);
  }
  SECTION("negligible thermal load gives a pure squeezed state") {
    const auto s = steady_state_squeezing(1e6, 0.5e6, 1e9, 1e4, 0.0);
    CHECK(s.nbar == 0.0);
    CHECK(s.r == Approx(std::atanh(0.5)).epsilon(1e-14));
  }
  SECTION("power-derived squeezing degree") {
    const double ratio = std::sqrt(50.0 / 80.0);
    const auto s = steady_state_squeezing(1.0, ratio, 1e3, 1e-2, 0.0);
    CHECK(s.r == Approx(1.0716).margin(2e-4));
    CHECK(s.r >= 1.05);
    CHECK(s.r <= 1.10);
  }
  SECTION("decoupled limit keeps the bath occupancy") {
    const auto s = steady_state_squeezing(1e-9, 0.0, 1e9, 1e4, 3.5);
    CHECK(s.nbar == Approx(3.5).epsilon(1e-6));
  }
  CHECK_THROWS_AS(steady_state_squeezing(1.0, 1.0, 1e9, 1e4, 0.0), instability_error);
  CHECK_THROWS_AS(steady_state_squeezing(1.0, 2.0, 1e9, 1e4, 0.0), instability_error);
}

TEST_CASE("Lyapunov steady state: decoupled and unstable cases") {
  SECTION("decoupled dissipative modes") {
    const auto ss = lyapunov_steady_state(0.0, 0.0, 1e9, 1e4, 3.5);
    const auto cav = ss.cavity_moments();
    const auto mech = ss.mechanical_moments();
    CHECK(cav.a == Approx(1.0).epsilon(1e-10));
    CHECK(cav.b == Approx(1.0).epsilon(1e-10));
    CHECK(mech.a == Approx(8.0).epsilon(1e-10));
    CHECK(mech.b == Approx(8.0).epsilon(1e-10));
  }
  SECTION("swapped drives are anti-damped") {
    CHECK_THROWS_AS(lyapunov_steady_state(37.8e6, 47.8e6, two_pi * 846e6, two_pi * 13.8e3, 0.0),
                    instability_error);
  }
}

TEST_CASE("Lyapunov oracle vs closed form in the deep-adiabatic regime") {
  // gamma chosen so the squeezed-thermal ansatz error (exactly
  // gamma (2 nbar + 1)(e^{+-2r} - 1) S / D) sits below 1e-6 over the grid
  const double kappa = 1.0, gamma = 1e-12, g1r = 0.01;
  for (double ratio : {0.0, 0.25, 0.5, 0.75, 0.95}) {
    for (double nbar : {0.0, 0.5, 2.0, 10.0}) {
      const double g1b = ratio * g1r;
      const auto spec = steady_state_squeezing(g1r, g1b, kappa, gamma, nbar);
      const auto closed = squeezed_thermal_moments(spec);
      const auto exact = lyapunov_steady_state(g1r, g1b, kappa, gamma, nbar).mechanical_moments();
      CHECK(closed.a == Approx(exact.a).margin(1e-6));
      CHECK(closed.b == Approx(exact.b).margin(1e-6));
    }
  }
}

TEST_CASE("Lyapunov oracle vs closed form: the residual obeys the exact gap law") {
  const double kappa = two_pi * 846e6, gamma = two_pi * 13.8e3;
  const double g1r = two_pi * 47.8e6;
  for (double ratio : {0.3, 0.6, 0.8}) {
    for (double nbar : {7.5e-4, 1.0, 10.0}) {
      const double g1b = ratio * g1r;
      const auto spec = steady_state_squeezing(g1r, g1b, kappa, gamma, nbar);
      const auto closed = squeezed_thermal_moments(spec);
      const auto exact = lyapunov_steady_state(g1r, g1b, kappa, gamma, nbar).mechanical_moments();
      double gap_a = 0.0, gap_b = 0.0;
      lyapunov_closed_form_gap(g1r, g1b, kappa, gamma, nbar, gap_a, gap_b);
      CHECK(closed.a - exact.a == Approx(gap_a).margin(1e-9 * std::abs(gap_b) + 1e-12));
      CHECK(closed.b - exact.b == Approx(gap_b).margin(1e-9 * std::abs(gap_b) + 1e-12));
    }
  }
}

TEST_CASE("paper-scale couplings: closed form within the adiabatic error bound") {
  const double kappa = two_pi * 846e6, gamma = two_pi * 13.8e3;
  const double g1r = two_pi * 47.8e6, g1b = g1r * std::sqrt(50.0 / 80.0);
  const double nbar = 7.5e-4;
  const auto spec = steady_state_squeezing(g1r, g1b, kappa, gamma, nbar);
  const auto closed = squeezed_thermal_moments(spec);
  const auto exact = lyapunov_steady_state(g1r, g1b, kappa, gamma, nbar).mechanical_moments();
  CHECK(closed.a == Approx(exact.a).margin(1e-4));
  CHECK(closed.b == Approx(exact.b).margin(1e-2));
}

TEST_CASE("output covariance assembly") {
  const auto mech = squeezed_thermal_moments({1.1, pi, 0.0});
  const SingleModeGaussian vac{1.0, 1.0, ModeTag::cavity};

  SECTION("identity beam splitter") {
    const auto s = assemble_output_covariance(mech, vac, 1.0);
    CHECK(s.s11 == Approx(mech.a));
    CHECK(s.s22 == Approx(mech.b));
    CHECK(s.s33 == 1.0);
    CHECK(s.s44 == 1.0);
    CHECK(s.s13 == 0.0);
    CHECK(s.s24 == 0.0);
  }
  SECTION("identical inputs leave no cross correlation") {
    const auto s = assemble_output_covariance(mech, {mech.a, mech.b, ModeTag::cavity}, 0.7);
    CHECK(s.s13 == Approx(0.0).margin(1e-15));
    CHECK(s.s24 == Approx(0.0).margin(1e-15));
  }
  SECTION("trace is independent of the transmissivity") {
    const double full = mech.a + mech.b + 2.0;
    for (double t : {0.1, 0.35, 0.6, 0.9, 1.0}) {
      const auto s = assemble_output_covariance(mech, vac, t);
      CHECK(s.trace() == Approx(full).epsilon(1e-12));
    }
  }
  SECTION("sub-block determinant identity") {
    // sigma11 sigma33 - sigma13^2 = A_m A_c for any passive mixing
    for (double t : {0.2, 0.51, 0.77}) {
      const auto s = assemble_output_covariance(mech, vac, std::sqrt(t));
      CHECK(s.s11 * s.s33 - s.s13 * s.s13 == Approx(mech.a * vac.a).epsilon(1e-12));
      CHECK(s.s22 * s.s44 - s.s24 * s.s24 == Approx(mech.b * vac.b).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(assemble_output_covariance(mech, vac, 0.0), config_error);
  CHECK_THROWS_AS(assemble_output_covariance(mech, vac, 1.5), config_error);
}
