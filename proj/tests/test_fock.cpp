#include <catch2/catch_amalgamated.hpp>

#include "catmech/conditioning.hpp"
#include "catmech/decoherence.hpp"
#include "catmech/fock.hpp"
#include "catmech/pipeline.hpp"

using namespace catmech;
using Catch::Approx;

namespace {
// (A, B) moments read off the density matrix: A/B = 2<b^dag b> -/+ 2 Re<b^2> + 1
std::pair<double, double> moments_of(const FockDensityMatrix& rho) {
  const Eigen::MatrixXcd b = fock::annihilation(rho.dim()).cast<complexd>();
  const double nbar = std::real((rho.rho * (b.adjoint() * b)).trace());
  const double b2 = std::real((rho.rho * b * b).trace());
  return {2.0 * nbar - 2.0 * b2 + 1.0, 2.0 * nbar + 2.0 * b2 + 1.0};
}
}  // namespace

TEST_CASE("squeezed thermal construction") {
  SECTION("trivial cases") {
    const auto vac = build_squeezed_thermal({0.0, pi, 0.0}, 24);
    CHECK(vac.rho(0, 0).real() == Approx(1.0).epsilon(1e-12));
    vac.validate();
  }
  SECTION("squeezed vacuum populations: odd levels empty, even match closed form") {
    const auto sq = build_squeezed_thermal({1.1, pi, 0.0}, 64);
    sq.validate();
    const double th = std::tanh(1.1);
    double c2k = 1.0 / std::cosh(1.1);  // |<2k|S|0>|^2 = (2k)! th^{2k} / (4^k (k!)^2 cosh r)
    for (int k = 0; k <= 10; ++k) {
      if (k > 0) c2k *= th * th * (2.0 * k - 1.0) / (2.0 * k);
      CHECK(sq.rho(2 * k, 2 * k).real() == Approx(c2k).epsilon(1e-8));
      CHECK(std::abs(sq.rho(2 * k + 1, 2 * k + 1)) < 1e-14);
    }
  }
  SECTION("second moments match the closed form") {
    for (double r : {0.4, 1.1}) {
      for (double nb : {0.0, 0.35}) {
        const auto rho = build_squeezed_thermal({r, pi, nb}, 96);
        const auto [a, b] = moments_of(rho);
        const auto m = squeezed_thermal_moments({r, pi, nb});
        CHECK(a == Approx(m.a).margin(1e-8));
        CHECK(b == Approx(m.b).margin(1e-8));
      }
    }
  }
  SECTION("tail guard expands or throws") {
    CHECK_THROWS_AS(build_squeezed_thermal({1.1, pi, 0.0}, 8, false), dimension_error);
    const auto grown = build_squeezed_thermal({1.1, pi, 0.0}, 8, true);
    CHECK(grown.dim() >= 16);
  }
}

TEST_CASE("beam splitter on single quanta") {
  FockDensityMatrix one;
  one.rho = Eigen::MatrixXcd::Zero(12, 12);
  one.rho(1, 1) = 1.0;
  FockDensityMatrix vac;
  vac.rho = Eigen::MatrixXcd::Zero(12, 12);
  vac.rho(0, 0) = 1.0;

  const double t_amp = std::sqrt(0.7);
  SECTION("no click keeps the phonon") {
    const auto h = beam_splitter_project(one, vac, t_amp, 0);
    CHECK(h.probability == Approx(0.7).epsilon(1e-12));
    CHECK(h.state.rho(1, 1).real() == Approx(1.0).epsilon(1e-12));
  }
  SECTION("a click empties the resonator") {
    const auto h = beam_splitter_project(one, vac, t_amp, 1);
    CHECK(h.probability == Approx(0.3).epsilon(1e-12));
    CHECK(h.state.rho(0, 0).real() == Approx(1.0).epsilon(1e-12));
  }
  SECTION("vacuum inputs cannot produce clicks") {
    CHECK(herald_probability_fock(vac, vac, t_amp, 1) == 0.0);
    CHECK(herald_probability_fock(vac, vac, t_amp, 3) == 0.0);
    CHECK_THROWS_AS(beam_splitter_project(vac, vac, t_amp, 2), herald_error);
  }
}

TEST_CASE("beam splitter conserves trace and positivity") {
  const auto rho_m = build_squeezed_thermal({0.9, pi, 0.2}, 48);
  const auto rho_c = build_squeezed_thermal({0.3, 0.0, 0.0}, 48);
  double total = 0.0;
  for (int n = 0; n < 48; ++n)
    total += herald_probability_fock(rho_m, rho_c, std::sqrt(0.6), n);
  CHECK(total == Approx(1.0).margin(1e-10));
  const auto h = beam_splitter_project(rho_m, rho_c, std::sqrt(0.6), 2);
  h.state.validate();
}

TEST_CASE("herald probabilities match the closed form") {
  const auto rho_m = build_squeezed_thermal({1.1, pi, 0.0}, 72);
  const auto rho_c = build_squeezed_thermal({0.0, 0.0, 0.0}, 72);
  const auto mech = squeezed_thermal_moments({1.1, pi, 0.0});
  for (const auto& h : reference_heralds()) {
    const double p_oracle =
        herald_probability_fock(rho_m, rho_c, std::sqrt(h.transmissivity), h.n);
    const double p_closed = detection_probability(herald_sigma(mech, h.transmissivity, 0.0), h.n);
    CHECK(p_oracle == Approx(p_closed).margin(1e-9));
  }
}

TEST_CASE("chi and Wigner of basic states") {
  FockDensityMatrix vac;
  vac.rho = Eigen::MatrixXcd::Zero(16, 16);
  vac.rho(0, 0) = 1.0;
  SECTION("vacuum chi and Wigner") {
    for (const complexd lam : {complexd{0.5, 0.0}, complexd{0.3, -0.8}}) {
      CHECK(chi_of_rho(vac, lam).real() == Approx(std::exp(-0.5 * std::norm(lam))).epsilon(1e-12));
      CHECK(std::abs(chi_of_rho(vac, lam).imag()) < 1e-14);
    }
    CHECK(wigner_of_rho(vac, {0.0, 0.0}) == Approx(2.0 / pi).epsilon(1e-12));
  }
  SECTION("single phonon Wigner dip") {
    FockDensityMatrix one;
    one.rho = Eigen::MatrixXcd::Zero(16, 16);
    one.rho(1, 1) = 1.0;
    CHECK(wigner_of_rho(one, {0.0, 0.0}) == Approx(-2.0 / pi).epsilon(1e-12));
  }
  SECTION("coherent state peak location") {
    FockDensityMatrix coh;
    const auto v = fock::coherent_vector(1.3, 40);
    coh.rho = v * v.adjoint();
    CHECK(wigner_of_rho(coh, {1.3, 0.0}) == Approx(2.0 / pi).epsilon(1e-9));
    CHECK(wigner_of_rho(coh, {0.0, 0.0}) ==
          Approx(2.0 / pi * std::exp(-2.0 * 1.3 * 1.3)).epsilon(1e-6));
  }
  SECTION("squeezed thermal chi matches the Gaussian moments") {
    const auto rho = build_squeezed_thermal({0.8, pi, 0.15}, 72);
    const auto m = squeezed_thermal_moments({0.8, pi, 0.15});
    for (const complexd lam : {complexd{0.6, 0.2}, complexd{-0.3, 0.6}}) {
      const double expect =
          std::exp(-0.5 * (m.a * sq(lam.real()) + m.b * sq(lam.imag())));
      CHECK(chi_of_rho(rho, lam).real() == Approx(expect).margin(1e-8));
    }
  }
}

TEST_CASE("heralded chi matches the closed form everywhere sampled") {
  const auto rho_m = build_squeezed_thermal({1.1, pi, 0.0}, 72);
  const auto rho_c = build_squeezed_thermal({0.0, 0.0, 0.0}, 72);
  const auto mech = squeezed_thermal_moments({1.1, pi, 0.0});
  const auto h = beam_splitter_project(rho_m, rho_c, std::sqrt(0.51), 1);
  const ConditionalChi cond(herald_sigma(mech, 0.51, 0.0), 1);
  CHECK(h.probability == Approx(cond.probability()).margin(1e-9));
  for (double lr = -1.5; lr <= 1.5; lr += 0.5)
    for (double li = -1.5; li <= 1.5; li += 0.5)
      CHECK(chi_of_rho(h.state, {lr, li}).real() ==
            Approx(cond({lr, li}).real()).margin(1e-8));
}

TEST_CASE("damping channel") {
  const auto sq = build_squeezed_thermal({0.8, pi, 0.0}, 48);
  const double gamma = 1.0, nbar = 0.7, t = 0.4;
  SECTION("trace preserved, positivity kept") {
    const auto damped = damp_rho(sq, gamma, nbar, t);
    CHECK(std::abs(damped.rho.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(damped.rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
  SECTION("halving the step changes nothing at 1e-8") {
    const auto d1 = damp_rho(sq, gamma, nbar, t);
    const int steps = std::max(64, static_cast<int>(std::ceil(8.0 * gamma * (2 * nbar + 1) * 48 * t)));
    const auto d2 = damp_rho(sq, gamma, nbar, t, 2 * steps);
    CHECK((d1.rho - d2.rho).cwiseAbs().maxCoeff() < 1e-8);
  }
  SECTION("vacuum relaxes to the bath occupancy") {
    FockDensityMatrix vac;
    vac.rho = Eigen::MatrixXcd::Zero(32, 32);
    vac.rho(0, 0) = 1.0;
    const auto fixed = damp_rho(vac, gamma, 0.5, 25.0);
    const Eigen::MatrixXcd b = fock::annihilation(32).cast<complexd>();
    const double n_final = std::real((fixed.rho * (b.adjoint() * b)).trace());
    CHECK(n_final == Approx(0.5).margin(1e-6));
  }
  SECTION("matches the closed-form channel on chi") {
    const auto mech = squeezed_thermal_moments({1.1, pi, 0.0});
    const ConditionalChi cond(herald_sigma(mech, 0.51, 0.0), 1);
    const auto rho_m = build_squeezed_thermal({1.1, pi, 0.0}, 72);
    const auto rho_c = build_squeezed_thermal({0.0, 0.0, 0.0}, 72);
    const auto h = beam_splitter_project(rho_m, rho_c, std::sqrt(0.51), 1);
    const double gm = two_pi * 13.8e3, nb = 0.9, tau = 2e-6;
    const auto damped = damp_rho(h.state, gm, nb, tau);
    const StoredState stored{cond.chi(), tau, gm, nb};
    for (const complexd lam : {complexd{0.5, 0.3}, complexd{-0.9, 0.7}, complexd{1.2, -0.4}}) {
      CHECK(chi_of_rho(damped, lam).real() == Approx(evolve_chi(stored, lam).real()).margin(2e-7));
    }
  }
}

TEST_CASE("readout channel matches the closed-form map") {
  const auto mech = squeezed_thermal_moments({1.1, pi, 0.0});
  const ConditionalChi cond(herald_sigma(mech, 0.51, 0.0), 1);
  const auto rho_m = build_squeezed_thermal({1.1, pi, 0.0}, 64);
  const auto rho_c = build_squeezed_thermal({0.0, 0.0, 0.0}, 64);
  const auto h = beam_splitter_project(rho_m, rho_c, std::sqrt(0.51), 1);

  const double leak = 0.25;
  const auto mapped = readout_channel_fock(h.state, leak);
  const auto out = readout_chi(cond.chi(), ReadoutMap{-std::log(leak), 1.0});
  for (const complexd z : {complexd{0.4, 0.2}, complexd{-0.7, 0.9}, complexd{1.1, -0.3}}) {
    CHECK(chi_of_rho(mapped, z).real() == Approx(out(z).real()).margin(1e-8));
  }
}
