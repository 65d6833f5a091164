#pragma once

#include <random>

#include "catmech/pipeline.hpp"

namespace catmech {

/// One analytic-vs-Fock equivalence case.
struct OracleCase {
  double r_m = 1.1, r_c = 0.0, transmissivity = 0.51, alpha = 1.2;
  int n = 1;
};

struct OracleCaseResult {
  OracleCase spec;
  double dp = 0.0, df = 0.0, dn = 0.0, dchi = 0.0;
  double p_analytic = 0.0, f_analytic = 0.0, n_analytic = 0.0;
};

struct OracleReport {
  std::vector<OracleCaseResult> cases;
  double max_dp = 0.0, max_df = 0.0, max_dn = 0.0, max_dchi = 0.0;
  double tol_dp = 1e-4, tol_df = 1e-3, tol_dn = 5e-3, tol_dchi = 1e-4;
  bool pass = false;

  json to_json() const {
    json out;
    out["tolerances"] = {{"p_r", tol_dp}, {"fidelity", tol_df}, {"negativity", tol_dn}, {"chi", tol_dchi}};
    out["max_deviations"] = {{"p_r", max_dp}, {"fidelity", max_df}, {"negativity", max_dn}, {"chi", max_dchi}};
    out["pass"] = pass;
    json arr = json::array();
    for (const auto& c : cases)
      arr.push_back({{"r_m", c.spec.r_m},
                     {"r_c", c.spec.r_c},
                     {"transmissivity", c.spec.transmissivity},
                     {"n", c.spec.n},
                     {"alpha", c.spec.alpha},
                     {"p_r", c.p_analytic},
                     {"fidelity", c.f_analytic},
                     {"negativity", c.n_analytic},
                     {"dp", c.dp},
                     {"df", c.df},
                     {"dn", c.dn},
                     {"dchi", c.dchi}});
    out["cases"] = arr;
    return out;
  }
};

/// Fixed probe points for the chi comparison.
inline std::vector<complexd> chi_probe_points() {
  return {{0.0, 0.0},  {0.3, 0.2},  {-0.5, 0.7}, {0.9, 0.0},  {0.0, 1.1},
          {0.7, -0.6}, {-1.3, -0.4}, {1.8, 0.3},  {-0.2, 1.5}};
}

/// The six reference heralds plus `extra_random` seeded draws with
/// r_m <= 1.2, r_c <= 1, T in [0.3, 0.95], n <= 4.
inline std::vector<OracleCase> oracle_case_list(int extra_random = 20,
                                                std::uint64_t seed = 0x5eed00c5) {
  std::vector<OracleCase> cases;
  for (const auto& h : reference_heralds())
    cases.push_back({1.1, 0.0, h.transmissivity, h.alpha, h.n});
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    // fixed 53-bit mapping; independent of library distribution internals
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  for (int i = 0; i < extra_random; ++i) {
    OracleCase c;
    c.r_m = uniform(0.2, 1.2);
    c.r_c = uniform(0.0, 1.0);
    c.transmissivity = uniform(0.3, 0.95);
    c.n = static_cast<int>(rng() % 5);  // 0..4
    c.alpha = uniform(0.8, 3.0);
    cases.push_back(c);
  }
  return cases;
}

/// Runs one equivalence case: closed-form pipeline vs truncated-Fock brute
/// force, compared on P_r, chi at the probe points, cat fidelity, and the
/// negativity evaluated on a shared grid.
inline OracleCaseResult run_oracle_case(const OracleCase& c, int dim = 72, int threads = 1,
                                        double grid_scale = 1.0) {
  OracleCaseResult res;
  res.spec = c;

  const SingleModeGaussian mech = squeezed_thermal_moments({c.r_m, pi, 0.0}, ModeTag::mechanical);
  const TwoModeCovariance sigma = herald_sigma(mech, c.transmissivity, c.r_c);
  const ConditionalChi cond(sigma, c.n);
  res.p_analytic = cond.probability();

  const FockDensityMatrix rho_m = build_squeezed_thermal({c.r_m, pi, 0.0}, dim);
  const FockDensityMatrix rho_c = build_squeezed_thermal({c.r_c, 0.0, 0.0}, dim);
  const HeraldedFockState heralded =
      beam_splitter_project(rho_m, rho_c, std::sqrt(c.transmissivity), c.n);
  res.dp = std::abs(res.p_analytic - heralded.probability);

  double dchi = 0.0;
  for (const complexd lam : chi_probe_points())
    dchi = std::max(dchi, std::abs(cond(lam) - chi_of_rho(heralded.state, lam)));
  res.dchi = dchi;

  const CatState cat{c.alpha, parity_of_count(c.n)};
  res.f_analytic =
      fidelity_chi_overlap(cond.chi(), cat_chi(cat), threads, 1e-12, grid_scale);
  res.df = std::abs(res.f_analytic - fidelity_fock(heralded.state, cat));

  const WignerGrid ga =
      wigner_auto(cond.chi(), threads, 6.0, 301, 1e-10, 1e-12, grid_scale);
  res.n_analytic = negativity(ga);
  const WignerGrid gf = wigner_grid_of_rho(heralded.state, ga.spec, threads);
  res.dn = std::abs(res.n_analytic - negativity(gf));
  return res;
}

inline OracleReport run_oracle_check(int extra_random = 20, int dim = 72, int threads = 1,
                                     double grid_scale = 1.0) {
  OracleReport rep;
  const auto cases = oracle_case_list(extra_random);
  rep.cases.resize(cases.size());
  const int total = static_cast<int>(cases.size());
  quadrature::parallel_for(total, threads, [&](int i) {
    rep.cases[i] = run_oracle_case(cases[i], dim, 1, grid_scale);
  });
  for (const auto& c : rep.cases) {
    rep.max_dp = std::max(rep.max_dp, c.dp);
    rep.max_df = std::max(rep.max_df, c.df);
    rep.max_dn = std::max(rep.max_dn, c.dn);
    rep.max_dchi = std::max(rep.max_dchi, c.dchi);
  }
  rep.pass = rep.max_dp < rep.tol_dp && rep.max_df < rep.tol_df && rep.max_dn < rep.tol_dn &&
             rep.max_dchi < rep.tol_dchi;
  return rep;
}

}  // namespace catmech
