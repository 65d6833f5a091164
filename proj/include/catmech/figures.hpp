#pragma once

#include <fstream>

#include "catmech/pipeline.hpp"

namespace catmech {

/// Per-point result of a heralding sweep.
struct SweepPoint {
  double alpha = 0.0;
  int n = 0;
  double t_star = 0.0, rc_star = 0.0;
  double f = 0.0, p_r = 0.0, n_m = 0.0;
};

/// Optimized fidelity curves F(alpha; n) with probability and negativity at
/// each optimum, for rc = 0 or rc co-optimized.
inline std::vector<SweepPoint> fidelity_sweep(const SingleModeGaussian& mech,
                                              const std::vector<double>& alphas,
                                              const std::vector<int>& counts, bool rc_optimized,
                                              const NumericsOptions& num) {
  std::vector<SweepPoint> pts(alphas.size() * counts.size());
  const int total = static_cast<int>(pts.size());
  // each point is independent; the optimizer itself runs single-threaded per point
  NumericsOptions point_num = num;
  point_num.threads = 1;
  quadrature::parallel_for(total, num.threads, [&](int idx) {
    const double alpha = alphas[idx % alphas.size()];
    const int n = counts[idx / alphas.size()];
    const auto res = optimize_fidelity(mech, n, alpha,
                                       rc_optimized ? RcMode::optimize : RcMode::zero, 0.0,
                                       point_num);
    SweepPoint p;
    p.alpha = alpha;
    p.n = n;
    p.t_star = res.t_star;
    p.rc_star = res.rc_star;
    p.f = res.f_star;
    const TwoModeCovariance sigma = herald_sigma(mech, res.t_star, res.rc_star);
    const ConditionalChi cond(sigma, n);
    p.p_r = cond.probability();
    const WignerGrid g = wigner_auto(cond.chi(), 1, num.wigner_half_width, num.wigner_points,
                                     1e-10, 1e-12, num.grid_scale);
    p.n_m = negativity(g);
    pts[idx] = p;
  });
  return pts;
}

inline void write_sweep_csv(const std::vector<SweepPoint>& pts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "alpha,n,t_star,rc_star,fidelity,p_r,n_m\n";
  for (const auto& p : pts)
    out << detail::fmt_double(p.alpha) << ',' << p.n << ',' << detail::fmt_double(p.t_star) << ','
        << detail::fmt_double(p.rc_star) << ',' << detail::fmt_double(p.f) << ','
        << detail::fmt_double(p.p_r) << ',' << detail::fmt_double(p.n_m) << '\n';
}

/// Optimized-fidelity curve family (two CSVs: rc = 0 and rc co-optimized).
inline std::vector<std::string> emit_fidelity_tables(const RunConfig& cfg,
                                                     const std::string& out_dir, bool force) {
  const auto dir = prepare_out_dir(out_dir, force);
  const DerivedState der = derive_state(cfg);
  std::vector<double> alphas;
  for (double a = 0.5; a <= 3.5 + 1e-9; a += 0.1) alphas.push_back(a);
  const std::vector<int> counts = {1, 2, 3, 4, 5, 6};
  std::vector<std::string> files;
  for (bool rc_opt : {false, true}) {
    const auto pts = fidelity_sweep(der.mech, alphas, counts, rc_opt, cfg.task.numerics);
    const std::string name = rc_opt ? "fidelity_rc_opt.csv" : "fidelity_rc0.csv";
    write_sweep_csv(pts, (dir / name).string());
    files.push_back(name);
  }
  return files;
}

/// Wigner grids (CSV + sidecar) and scalars for the six reference heralds.
inline json emit_wigner_gallery(const RunConfig& cfg, const std::string& out_dir, bool force) {
  const auto dir = prepare_out_dir(out_dir, force);
  const DerivedState der = derive_state(cfg);
  const auto& num = cfg.task.numerics;
  json rows = json::array();
  for (const auto& h : reference_heralds()) {
    const TwoModeCovariance sigma = herald_sigma(der.mech, h.transmissivity, 0.0);
    const ConditionalChi cond(sigma, h.n);
    const CatState cat{h.alpha, parity_of_count(h.n)};
    const double f =
        fidelity_chi_overlap(cond.chi(), cat_chi(cat), num.threads, 1e-12, num.grid_scale);
    const WignerGrid g = wigner_auto(cond.chi(), num.threads, num.wigner_half_width,
                                     num.wigner_points, 1e-10, 1e-12, num.grid_scale);
    const std::string name = "wigner_n" + std::to_string(h.n) + ".csv";
    write_wigner_csv(g, (dir / name).string());
    rows.push_back({{"n", h.n},
                    {"transmissivity", h.transmissivity},
                    {"alpha", h.alpha},
                    {"p_r", cond.probability()},
                    {"fidelity", f},
                    {"n_m", negativity(g)},
                    {"file", name}});
  }
  std::ofstream out(dir / "wigner_gallery.json");
  out << rows.dump(2) << '\n';
  return rows;
}

/// Storage/readout sweeps: negativity of the readout field against storage
/// time (at the config temperature) and against temperature (at a reference
/// storage time), one row per reference herald.
inline std::vector<std::string> emit_storage_tables(const RunConfig& cfg,
                                                    const std::string& out_dir, bool force) {
  const auto dir = prepare_out_dir(out_dir, force);
  const auto& num = cfg.task.numerics;

  std::vector<double> taus = cfg.task.tau_st_sweep;
  if (taus.empty())
    for (double t = 0.0; t <= 1.0e-6 + 1e-15; t += 0.1e-6) taus.push_back(t);
  std::vector<double> temps = cfg.task.temperature_sweep;
  if (temps.empty()) temps = {0.035, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
  const double tau_ref = cfg.schedule.tau_st > 0 ? cfg.schedule.tau_st : 100e-9;

  const auto heralds = reference_heralds();

  struct Row {
    int n;
    double t, alpha, tau, temp, n_m, n_cr;
  };
  std::vector<Row> tau_rows(heralds.size() * taus.size());
  std::vector<Row> temp_rows(heralds.size() * temps.size());

  // temperature affects the initial squeezing stage as well as the storage bath
  auto pipeline_at = [&](const HeraldSpec& h, double temperature, double tau_st, Row& row) {
    RunConfig local = cfg;
    local.physical.temperature = temperature;
    const DerivedState der = derive_state(local);
    const TwoModeCovariance sigma = herald_sigma(der.mech, h.transmissivity, 0.0);
    const ConditionalChi cond(sigma, h.n);
    const ChiFunction heralded = cond.chi();
    const WignerGrid gm = wigner_auto(heralded, 1, num.wigner_half_width, num.wigner_points,
                                      1e-10, 1e-12, num.grid_scale);
    const ReadoutMap map{der.big_g3r, local.schedule.tau_rd};
    row.n = h.n;
    row.t = h.transmissivity;
    row.alpha = h.alpha;
    row.tau = tau_st;
    row.temp = temperature;
    row.n_m = negativity(gm);
    row.n_cr = readout_negativity(heralded, tau_st, local.physical.gamma_m, der.nbar_th, map, 1,
                                  num.wigner_half_width, num.wigner_points, num.grid_scale);
  };

  const int n_tau = static_cast<int>(tau_rows.size());
  quadrature::parallel_for(n_tau, num.threads, [&](int idx) {
    const auto& h = heralds[idx / taus.size()];
    pipeline_at(h, cfg.physical.temperature, taus[idx % taus.size()], tau_rows[idx]);
  });
  const int n_temp = static_cast<int>(temp_rows.size());
  quadrature::parallel_for(n_temp, num.threads, [&](int idx) {
    const auto& h = heralds[idx / temps.size()];
    pipeline_at(h, temps[idx % temps.size()], tau_ref, temp_rows[idx]);
  });

  auto write = [&](const std::vector<Row>& rows, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw config_error("cannot write " + name);
    out << "n,transmissivity,alpha,tau_st_s,temperature_k,n_m,n_cr\n";
    for (const auto& r : rows)
      out << r.n << ',' << detail::fmt_double(r.t) << ',' << detail::fmt_double(r.alpha) << ','
          << detail::fmt_double(r.tau) << ',' << detail::fmt_double(r.temp) << ','
          << detail::fmt_double(r.n_m) << ',' << detail::fmt_double(r.n_cr) << '\n';
  };
  write(tau_rows, "storage_tau_sweep.csv");
  write(temp_rows, "storage_temp_sweep.csv");
  return {"storage_tau_sweep.csv", "storage_temp_sweep.csv"};
}

}  // namespace catmech
