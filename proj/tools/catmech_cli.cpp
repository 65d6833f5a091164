// Command-line driver for the pulsed-optomechanics cat-state pipeline.
//
// Subcommands cover the individual protocol stages (squeeze, subtract,
// store, readout), the end-to-end run (pipeline), parameter optimization,
// the figure-data emitters, and the analytic-vs-Fock equivalence suite.
//
// Exit codes: 0 success, 2 config error, 3 numerical-convergence error,
// 4 oracle mismatch.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "catmech/catmech.hpp"

namespace {

using catmech::json;

json read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw catmech::config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw catmech::config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  int threads = 0;        // 0 = take from config
  double grid_scale = 0;  // 0 = take from config
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_out = true) {
  cmd->add_option("--config", a.config_path, "JSON run configuration")->required();
  if (with_out) {
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_flag("--force", a.force, "overwrite an existing run directory");
  }
  cmd->add_option("--threads", a.threads, "worker threads (overrides config)");
  cmd->add_option("--grid-scale", a.grid_scale, "quadrature density multiplier (overrides config)");
}

std::pair<catmech::RunConfig, json> load(const CommonArgs& a) {
  const json j = read_config_json(a.config_path);
  catmech::RunConfig cfg = catmech::parse_config(j);
  if (a.threads > 0) cfg.task.numerics.threads = a.threads;
  if (a.grid_scale > 0) cfg.task.numerics.grid_scale = a.grid_scale;
  return {cfg, j};
}

void print_warnings(const catmech::DerivedState& d) {
  for (const auto& w : d.warnings)
    std::cerr << "warning: " << w.message << " (ratio " << w.ratio << ", want >= 10)\n";
}

int cmd_squeeze(const CommonArgs& a) {
  auto [cfg, echo] = load(a);
  const auto d = catmech::derive_state(cfg);
  print_warnings(d);
  const auto lyap =
      catmech::lyapunov_steady_state(d.couplings.g1r, d.couplings.g1b, cfg.physical.kappa_c,
                                     cfg.physical.gamma_m, d.nbar_th);
  const auto mech_exact = lyap.mechanical_moments();
  json out;
  out["nbar_th"] = d.nbar_th;
  out["couplings_hz"] = {{"g1r", d.couplings.g1r / catmech::two_pi},
                         {"g1b", d.couplings.g1b / catmech::two_pi},
                         {"g2r", d.couplings.g2r / catmech::two_pi},
                         {"g3r", d.couplings.g3r / catmech::two_pi}};
  out["r_m"] = d.mech_spec.r;
  out["mbar"] = d.mech_spec.nbar;
  out["moments_closed_form"] = {d.mech.a, d.mech.b};
  out["moments_lyapunov"] = {mech_exact.a, mech_exact.b};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_subtract(const CommonArgs& a) {
  auto [cfg, echo] = load(a);
  const auto d = catmech::derive_state(cfg);
  print_warnings(d);
  const double rc = cfg.task.rc_mode == catmech::RcMode::fixed ? cfg.task.rc_value : 0.0;
  const auto sigma = catmech::herald_sigma(d.mech, d.transmissivity, rc);
  const catmech::ConditionalChi cond(sigma, cfg.task.n);

  json out;
  out["n"] = cfg.task.n;
  out["transmissivity"] = d.transmissivity;
  out["p_r"] = cond.probability();
  // chi sampled on a square grid out to the quadrature cutoff
  double lr, li;
  catmech::verified_cutoffs(cond.chi(), 1e-12, lr, li);
  const int pts = 41;
  json grid = json::array();
  for (int i = 0; i < pts; ++i) {
    for (int j = 0; j < pts; ++j) {
      const double x = -lr + 2.0 * lr * i / (pts - 1);
      const double y = -li + 2.0 * li * j / (pts - 1);
      const catmech::complexd v = cond({x, y});
      grid.push_back({x, y, v.real(), v.imag()});
    }
  }
  out["chi_grid_columns"] = {"lambda_re", "lambda_im", "chi_re", "chi_im"};
  out["chi_grid"] = grid;
  if (!a.out_dir.empty()) {
    const auto dir = catmech::prepare_out_dir(a.out_dir, a.force);
    std::ofstream f(dir / "subtract.json");
    f << out.dump(2) << '\n';
  } else {
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

int cmd_store_or_readout(const CommonArgs& a, bool temperature_sweep) {
  auto [cfg, echo] = load(a);
  const auto& num = cfg.task.numerics;

  std::vector<double> taus = cfg.task.tau_st_sweep;
  if (taus.empty()) taus = {cfg.schedule.tau_st};
  std::vector<double> temps = cfg.task.temperature_sweep;
  if (temps.empty()) temps = {cfg.physical.temperature};
  if (!temperature_sweep) temps = {cfg.physical.temperature};
  if (temperature_sweep && taus.size() > 1) taus = {cfg.schedule.tau_st};

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!a.out_dir.empty()) {
    const auto dir = catmech::prepare_out_dir(a.out_dir, a.force);
    file.open(dir / (temperature_sweep ? "readout_sweep.csv" : "store_sweep.csv"));
    os = &file;
  }
  *os << "tau_st_s,temperature_k,n_m,n_cr\n";
  for (double temp : temps) {
    catmech::RunConfig local = cfg;
    local.physical.temperature = temp;
    const auto d = catmech::derive_state(local);
    const double rc = cfg.task.rc_mode == catmech::RcMode::fixed ? cfg.task.rc_value : 0.0;
    const auto sigma = catmech::herald_sigma(d.mech, d.transmissivity, rc);
    const catmech::ConditionalChi cond(sigma, cfg.task.n);
    const auto heralded = cond.chi();
    const auto gm = catmech::wigner_auto(heralded, num.threads, num.wigner_half_width,
                                         num.wigner_points, 1e-10, 1e-12, num.grid_scale);
    const double n_m = catmech::negativity(gm);
    const catmech::ReadoutMap map{d.big_g3r, cfg.schedule.tau_rd};
    for (double tau : taus) {
      const double n_cr =
          catmech::readout_negativity(heralded, tau, local.physical.gamma_m, d.nbar_th, map,
                                      num.threads, num.wigner_half_width, num.wigner_points,
                                      num.grid_scale);
      *os << catmech::detail::fmt_double(tau) << ',' << catmech::detail::fmt_double(temp) << ','
          << catmech::detail::fmt_double(n_m) << ',' << catmech::detail::fmt_double(n_cr) << '\n';
    }
  }
  return 0;
}

int cmd_pipeline(const CommonArgs& a) {
  auto [cfg, echo] = load(a);
  const auto man = catmech::run_pipeline(cfg, echo, a.out_dir, a.force);
  print_warnings(man.derived);
  std::cout << man.to_json().dump(2) << '\n';
  return 0;
}

int cmd_optimize(const CommonArgs& a) {
  auto [cfg, echo] = load(a);
  const auto d = catmech::derive_state(cfg);
  json rows = json::array();
  for (double alpha : cfg.task.alphas) {
    const auto res = catmech::optimize_fidelity(d.mech, cfg.task.n, alpha, cfg.task.rc_mode,
                                                cfg.task.rc_value, cfg.task.numerics);
    rows.push_back({{"n", cfg.task.n},
                    {"alpha", alpha},
                    {"t_star", res.t_star},
                    {"rc_star", res.rc_star},
                    {"fidelity", res.f_star},
                    {"evaluations", res.evaluations}});
  }
  std::cout << rows.dump(2) << '\n';
  return 0;
}

int cmd_fig(const CommonArgs& a, const std::string& which) {
  auto [cfg, echo] = load(a);
  const std::string out = a.out_dir.empty() ? ("catmech_" + which) : a.out_dir;
  if (which == "fig2") {
    catmech::emit_fidelity_tables(cfg, out, a.force);
  } else if (which == "fig3") {
    const json rows = catmech::emit_wigner_gallery(cfg, out, a.force);
    std::cout << rows.dump(2) << '\n';
  } else {
    catmech::emit_storage_tables(cfg, out, a.force);
  }
  std::cout << "wrote " << which << " tables to " << out << '\n';
  return 0;
}

int cmd_oracle_check(const CommonArgs& a, int cases, int dim) {
  auto [cfg, echo] = load(a);
  const auto rep = catmech::run_oracle_check(cases, dim, cfg.task.numerics.threads,
                                             cfg.task.numerics.grid_scale);
  if (!a.out_dir.empty()) {
    const auto dir = catmech::prepare_out_dir(a.out_dir, a.force);
    std::ofstream f(dir / "oracle_report.json");
    f << rep.to_json().dump(2) << '\n';
  }
  std::cout << rep.to_json().dump(2) << '\n';
  return rep.pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulsed-optomechanics cat-state pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", catmech::version);

  CommonArgs a;
  int oracle_cases = 20;
  int oracle_dim = 72;

  auto* squeeze = app.add_subcommand("squeeze", "steady-state squeezing stage");
  add_common(squeeze, a, false);
  auto* subtract = app.add_subcommand("subtract", "heralded phonon subtraction");
  add_common(subtract, a);
  auto* store = app.add_subcommand("store", "storage-decoherence sweep");
  add_common(store, a);
  auto* readout = app.add_subcommand("readout", "readout sweep over temperature");
  add_common(readout, a);
  auto* pipeline = app.add_subcommand("pipeline", "full protocol run with manifest");
  add_common(pipeline, a);
  auto* optimize = app.add_subcommand("optimize", "maximize cat fidelity over (T, r_c)");
  add_common(optimize, a, false);
  auto* fig2 = app.add_subcommand("fig2", "optimized fidelity/probability curves");
  add_common(fig2, a);
  auto* fig3 = app.add_subcommand("fig3", "Wigner gallery for the reference heralds");
  add_common(fig3, a);
  auto* fig4 = app.add_subcommand("fig4", "storage/readout negativity sweeps");
  add_common(fig4, a);
  auto* oracle = app.add_subcommand("oracle-check", "analytic vs Fock equivalence suite");
  add_common(oracle, a);
  oracle->add_option("--cases", oracle_cases, "number of randomized cases");
  oracle->add_option("--dim", oracle_dim, "Fock truncation dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    if (squeeze->parsed()) return cmd_squeeze(a);
    if (subtract->parsed()) return cmd_subtract(a);
    if (store->parsed()) return cmd_store_or_readout(a, false);
    if (readout->parsed()) return cmd_store_or_readout(a, true);
    if (pipeline->parsed()) return cmd_pipeline(a);
    if (optimize->parsed()) return cmd_optimize(a);
    if (fig2->parsed()) return cmd_fig(a, "fig2");
    if (fig3->parsed()) return cmd_fig(a, "fig3");
    if (fig4->parsed()) return cmd_fig(a, "fig4");
    if (oracle->parsed()) return cmd_oracle_check(a, oracle_cases, oracle_dim);
  } catch (const catmech::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const catmech::instability_error& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return 2;
  } catch (const catmech::convergence_error& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
