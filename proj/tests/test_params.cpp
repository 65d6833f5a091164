#include <catch2/catch_amalgamated.hpp>

#include "catmech/params.hpp"

using namespace catmech;
using Catch::Approx;

namespace {
PhysicalParams paper_params() {
  PhysicalParams p;
  p.omega_m = two_pi * 5.25e9;
  p.kappa_c = two_pi * 846e6;
  p.gamma_m = two_pi * 13.8e3;
  p.g0 = two_pi * 869e3;
  p.temperature = 0.035;
  p.omega_c = two_pi * c_light / 1550e-9;
  return p;
}
}  // namespace

TEST_CASE("thermal occupancy matches the Bose-Einstein values") {
  const double wm = two_pi * 5.25e9;
  CHECK(thermal_occupancy(wm, 1.0) == Approx(3.4898).margin(0.005));
  CHECK(thermal_occupancy(wm, 0.0) == 0.0);
  // high-precision reference: 1/(exp(hbar w / k T) - 1) at 35 mK
  const double x = hbar * wm / (k_boltzmann * 0.035);
  CHECK(thermal_occupancy(wm, 0.035) == Approx(1.0 / std::expm1(x)).epsilon(1e-14));
  CHECK(thermal_occupancy(wm, 0.035) == Approx(7.48e-4).margin(2e-6));
}

TEST_CASE("thermal occupancy is monotone in T and in omega") {
  const double wm = two_pi * 5.25e9;
  double prev = 0.0;
  for (double t = 0.01; t <= 2.0; t += 0.05) {
    const double v = thermal_occupancy(wm, t);
    CHECK(v > prev);
    prev = v;
  }
  prev = thermal_occupancy(two_pi * 1e8, 0.5);
  for (double w = 2e8; w <= 2e10; w *= 1.5) {
    const double v = thermal_occupancy(two_pi * w, 0.5);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("collective coupling scaling") {
  const auto p = paper_params();
  CHECK(collective_coupling(0.0, p) == 0.0);
  const double g1 = collective_coupling(40e-6, p);
  const double g2 = collective_coupling(80e-6, p);
  CHECK(g2 / g1 == Approx(std::sqrt(2.0)).epsilon(1e-12));
  // power ratio fixes the coupling ratio independent of omega_c
  const double gr = collective_coupling(80e-6, p);
  const double gb = collective_coupling(50e-6, p);
  CHECK(gb / gr == Approx(std::sqrt(50.0 / 80.0)).epsilon(1e-12));
  // g^2 linear in P
  const double g3 = collective_coupling(120e-6, p);
  CHECK(g3 * g3 / (g1 * g1) == Approx(3.0).epsilon(1e-12));

  PhysicalParams no_wc = p;
  no_wc.omega_c.reset();
  CHECK_THROWS_AS(collective_coupling(1e-6, no_wc), config_error);
}

TEST_CASE("adiabatic rate and transmissivity") {
  CHECK(adiabatic_rate(0.0, two_pi * 846e6) == 0.0);
  const double g3r = two_pi * 65e6;
  const double big_g = adiabatic_rate(g3r, two_pi * 846e6);
  CHECK(big_g / two_pi == Approx(4.0 * 65e6 * 65e6 / 846e6).epsilon(1e-12));
  CHECK(big_g / two_pi == Approx(19.976e6).epsilon(1e-4));

  CHECK(transmissivity(big_g, 0.0) == 1.0);
  CHECK(transmissivity(big_g, 30e-9) == Approx(0.0232).margin(2e-4));
  CHECK(transmissivity(big_g, 1.0) == Approx(0.0).margin(1e-12));

  const double g_small = two_pi * 3.36e6;
  const double big_small = adiabatic_rate(g_small, two_pi * 846e6);
  CHECK(transmissivity(big_small, 30e-9) == Approx(0.99).margin(0.001));
}

TEST_CASE("transmissivity is decreasing in G and tau and stays in (0, 1]") {
  double prev = 1.1;
  for (double g = 0.0; g < 5e8; g += 5e7) {
    const double v = transmissivity(g, 1e-8);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("timescale hierarchy warnings") {
  const auto p = paper_params();
  PulseSchedule s;
  s.tau_rb = s.tau_ps = s.tau_rd = 30e-9;
  s.tau_st = 1e-6;
  s.drives = DriveCouplings{two_pi * 47.8e6, two_pi * 37.8e6, two_pi * 2.4e6, two_pi * 65e6};
  CHECK(validate_timescales(p, s).empty());

  PulseSchedule bad = s;
  bad.tau_rb = 0.1 / p.kappa_c;
  const auto w1 = validate_timescales(p, bad);
  REQUIRE_FALSE(w1.empty());
  CHECK(w1.front().message.find("tau_rb") != std::string::npos);

  PulseSchedule slow = s;
  slow.tau_st = 20.0 / p.gamma_m;
  const auto w2 = validate_timescales(p, slow);
  REQUIRE_FALSE(w2.empty());
  CHECK(w2.back().message.find("tau_st") != std::string::npos);
}

TEST_CASE("parameter validation") {
  PhysicalParams p = paper_params();
  p.kappa_c = -1.0;
  CHECK_THROWS_AS(p.validate(), config_error);
  CHECK_THROWS_AS(thermal_occupancy(-1.0, 1.0), config_error);
  CHECK_THROWS_AS(thermal_occupancy(1.0, -1.0), config_error);

  PulseSchedule s;
  s.tau_rb = -1.0;
  CHECK_THROWS_AS(s.validate(), config_error);

  PulseSchedule swap;
  swap.drives = DriveCouplings{1.0, 2.0, 1.0, 1.0};  // g1b > g1r
  CHECK_THROWS_AS(resolve_couplings(paper_params(), swap), instability_error);
}
