#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/conditioning.hpp"
#include "catmech/decoherence.hpp"
#include "catmech/fock.hpp"
#include "catmech/gaussian.hpp"
#include "catmech/lyapunov.hpp"
#include "catmech/optimize.hpp"
#include "catmech/params.hpp"
#include "catmech/quadrature.hpp"
#include "catmech/version.hpp"
#include "catmech/wigner.hpp"

namespace catmech {

using json = nlohmann::json;

enum class RcMode { zero, optimize, fixed };

/// One heralding configuration: photon count, beam-splitter weight
/// (intensity transmissivity), and the cat amplitude it targets.
struct HeraldSpec {
  int n = 1;
  double transmissivity = 0.51;  ///< intensity: fraction of mechanical quanta kept
  double alpha = 1.2;
};

/// The six reference heralding configurations (odd family n = 1, 3, 5 and
/// even family n = 2, 4, 6 against cats of amplitude 1.2, 2, 3).
inline std::vector<HeraldSpec> reference_heralds() {
  return {{1, 0.51, 1.2}, {3, 0.65, 2.0}, {5, 0.77, 3.0},
          {2, 0.46, 1.2}, {4, 0.59, 2.0}, {6, 0.70, 3.0}};
}

struct NumericsOptions {
  double grid_scale = 1.0;       ///< multiplies quadrature node densities
  double wigner_half_width = 6.0;
  int wigner_points = 301;
  int threads = 1;
};

struct TaskSpec {
  int n = 1;
  std::vector<double> alphas = {1.2};
  RcMode rc_mode = RcMode::zero;
  double rc_value = 0.0;
  std::optional<double> transmissivity;  ///< intensity; defaults to e^{-2 G_2r tau_ps}
  std::optional<CatParity> parity;       ///< optional; must match the parity of n
  std::vector<double> tau_st_sweep;      ///< for store sweeps (s)
  std::vector<double> temperature_sweep; ///< for readout sweeps (K)
  NumericsOptions numerics;
};

struct RunConfig {
  PhysicalParams physical;
  PulseSchedule schedule;
  TaskSpec task;
};

// ---------------------------------------------------------------------------
// config ingestion (strict: unknown keys rejected, _hz values are omega/2pi)
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw config_error("unknown key '" + it.key() + "' in " + where);
  }
}

inline double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw config_error(std::string("missing key '") + key + "' in " + where);
  if (!j.at(key).is_number()) throw config_error(std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline PhysicalParams parse_physical(const json& j) {
  detail::reject_unknown(
      j, {"omega_m_hz", "omega_c_hz", "kappa_c_hz", "gamma_m_hz", "g0_hz", "temperature_k"},
      "physical");
  PhysicalParams p;
  p.omega_m = two_pi * detail::require_number(j, "omega_m_hz", "physical");
  if (j.contains("omega_c_hz")) p.omega_c = two_pi * j.at("omega_c_hz").get<double>();
  p.kappa_c = two_pi * detail::require_number(j, "kappa_c_hz", "physical");
  p.gamma_m = two_pi * detail::require_number(j, "gamma_m_hz", "physical");
  p.g0 = two_pi * detail::require_number(j, "g0_hz", "physical");
  p.temperature = detail::require_number(j, "temperature_k", "physical");
  p.validate();
  return p;
}

inline PulseSchedule parse_schedule(const json& j, PhysicalParams& phys) {
  detail::reject_unknown(j, {"tau_rb_s", "tau_wt_s", "tau_ps_s", "tau_st_s", "tau_rd_s", "drives"},
                         "schedule");
  PulseSchedule s;
  s.tau_rb = detail::require_number(j, "tau_rb_s", "schedule");
  s.tau_wt = detail::require_number(j, "tau_wt_s", "schedule");
  s.tau_ps = detail::require_number(j, "tau_ps_s", "schedule");
  s.tau_st = detail::require_number(j, "tau_st_s", "schedule");
  s.tau_rd = detail::require_number(j, "tau_rd_s", "schedule");
  if (!j.contains("drives")) throw config_error("missing key 'drives' in schedule");
  const json& d = j.at("drives");
  detail::reject_unknown(d, {"powers_w", "couplings_hz"}, "schedule.drives");
  const bool has_powers = d.contains("powers_w");
  const bool has_couplings = d.contains("couplings_hz");
  if (has_powers == has_couplings)
    throw config_error("exactly one of drives.powers_w / drives.couplings_hz must be given");
  if (has_powers) {
    const json& pw = d.at("powers_w");
    detail::reject_unknown(pw, {"p1r", "p1b", "p2r", "p3r"}, "drives.powers_w");
    DrivePowers p;
    p.p1r = detail::require_number(pw, "p1r", "powers_w");
    p.p1b = detail::require_number(pw, "p1b", "powers_w");
    p.p2r = detail::require_number(pw, "p2r", "powers_w");
    p.p3r = detail::require_number(pw, "p3r", "powers_w");
    s.drives = p;
    if (!phys.omega_c) phys.omega_c = two_pi * c_light / 1550e-9;  // telecom-band default
  } else {
    const json& cp = d.at("couplings_hz");
    detail::reject_unknown(cp, {"g1r", "g1b", "g2r", "g3r"}, "drives.couplings_hz");
    DriveCouplings g;
    g.g1r = two_pi * detail::require_number(cp, "g1r", "couplings_hz");
    g.g1b = two_pi * detail::require_number(cp, "g1b", "couplings_hz");
    g.g2r = two_pi * detail::require_number(cp, "g2r", "couplings_hz");
    g.g3r = two_pi * detail::require_number(cp, "g3r", "couplings_hz");
    s.drives = g;
  }
  s.validate();
  return s;
}

inline TaskSpec parse_task(const json& j) {
  detail::reject_unknown(j,
                         {"n", "alphas", "rc_mode", "rc_value", "transmissivity", "parity",
                          "tau_st_sweep_s", "temperature_sweep_k", "grid_scale",
                          "wigner_half_width", "wigner_points", "threads"},
                         "task");
  TaskSpec t;
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<int>() < 0)
      throw config_error("task.n must be a non-negative integer");
    t.n = j.at("n").get<int>();
  }
  if (j.contains("alphas")) t.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("rc_mode")) {
    const std::string m = j.at("rc_mode").get<std::string>();
    if (m == "zero")
      t.rc_mode = RcMode::zero;
    else if (m == "optimize")
      t.rc_mode = RcMode::optimize;
    else if (m == "fixed")
      t.rc_mode = RcMode::fixed;
    else
      throw config_error("task.rc_mode must be zero | optimize | fixed");
  }
  if (j.contains("rc_value")) t.rc_value = j.at("rc_value").get<double>();
  if (t.rc_mode == RcMode::fixed && t.rc_value < 0.0)
    throw config_error("task.rc_value must be >= 0");
  if (j.contains("transmissivity")) {
    const double v = j.at("transmissivity").get<double>();
    if (!(v > 0.0) || v > 1.0) throw config_error("task.transmissivity must be in (0, 1]");
    t.transmissivity = v;
  }
  if (j.contains("parity")) {
    const std::string p = j.at("parity").get<std::string>();
    if (p == "even")
      t.parity = CatParity::even;
    else if (p == "odd")
      t.parity = CatParity::odd;
    else
      throw config_error("task.parity must be even | odd");
    if (*t.parity != parity_of_count(t.n))
      throw config_error("task.parity does not match the parity of the detected count n");
  }
  if (j.contains("tau_st_sweep_s")) t.tau_st_sweep = j.at("tau_st_sweep_s").get<std::vector<double>>();
  if (j.contains("temperature_sweep_k"))
    t.temperature_sweep = j.at("temperature_sweep_k").get<std::vector<double>>();
  if (j.contains("grid_scale")) t.numerics.grid_scale = j.at("grid_scale").get<double>();
  if (t.numerics.grid_scale < 0.25 || t.numerics.grid_scale > 8.0)
    throw config_error("task.grid_scale out of range [0.25, 8]");
  if (j.contains("wigner_half_width"))
    t.numerics.wigner_half_width = j.at("wigner_half_width").get<double>();
  if (j.contains("wigner_points")) t.numerics.wigner_points = j.at("wigner_points").get<int>();
  if (j.contains("threads")) t.numerics.threads = j.at("threads").get<int>();
  if (t.numerics.threads < 1 || t.numerics.threads > 256)
    throw config_error("task.threads out of range [1, 256]");
  return t;
}

inline RunConfig parse_config(const json& j) {
  detail::reject_unknown(j, {"physical", "schedule", "task"}, "config root");
  if (!j.contains("physical") || !j.contains("schedule"))
    throw config_error("config must contain 'physical' and 'schedule'");
  RunConfig c;
  c.physical = parse_physical(j.at("physical"));
  c.schedule = parse_schedule(j.at("schedule"), c.physical);
  if (j.contains("task")) c.task = parse_task(j.at("task"));
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// derived step-1/step-2 quantities shared by every task
// ---------------------------------------------------------------------------

struct DerivedState {
  double nbar_th = 0.0;
  DriveCouplings couplings;        // rad/s
  SqueezedThermalSpec mech_spec;
  SingleModeGaussian mech;
  double transmissivity = 0.0;     // intensity weight actually used
  double big_g2r = 0.0, big_g3r = 0.0;
  std::vector<TimescaleWarning> warnings;
};

inline DerivedState derive_state(const RunConfig& cfg) {
  DerivedState d;
  d.nbar_th = thermal_occupancy(cfg.physical.omega_m, cfg.physical.temperature);
  d.couplings = resolve_couplings(cfg.physical, cfg.schedule);
  d.mech_spec = steady_state_squeezing(d.couplings.g1r, d.couplings.g1b, cfg.physical.kappa_c,
                                       cfg.physical.gamma_m, d.nbar_th);
  d.mech = squeezed_thermal_moments(d.mech_spec, ModeTag::mechanical);
  d.big_g2r = adiabatic_rate(d.couplings.g2r, cfg.physical.kappa_c);
  d.big_g3r = adiabatic_rate(d.couplings.g3r, cfg.physical.kappa_c);
  if (cfg.task.transmissivity) {
    d.transmissivity = *cfg.task.transmissivity;
  } else {
    const double amp = transmissivity(d.big_g2r, cfg.schedule.tau_ps);
    d.transmissivity = amp * amp;
  }
  d.warnings = validate_timescales(cfg.physical, cfg.schedule);
  return d;
}

inline SingleModeGaussian cavity_moments(double rc) {
  return squeezed_thermal_moments({rc, 0.0, 0.0}, ModeTag::cavity);
}

/// sigma for a herald at intensity weight T and cavity squeezing rc.
inline TwoModeCovariance herald_sigma(const SingleModeGaussian& mech, double intensity_t,
                                      double rc) {
  return assemble_output_covariance(mech, cavity_moments(rc), std::sqrt(intensity_t));
}

/// Fidelity of the heralded state to the cat of amplitude alpha with the
/// parity matching n (separable fast path; the optimizer objective).
inline double herald_fidelity(const SingleModeGaussian& mech, double intensity_t, double rc, int n,
                              double alpha, const NumericsOptions& num = {}) {
  const ConditionalChi cond(herald_sigma(mech, intensity_t, rc), n);
  const CatState cat{alpha, parity_of_count(n)};
  return fidelity_to_cat(cond, cat, num.grid_scale);
}

// ---------------------------------------------------------------------------
// artifact writers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// CSV with columns beta_re, beta_im, W plus a JSON metadata sidecar.
inline void write_wigner_csv(const WignerGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "beta_re,beta_im,W\n";
  for (int i = 0; i < g.spec.n_re; ++i)
    for (int j = 0; j < g.spec.n_im; ++j)
      out << detail::fmt_double(g.beta_re(i)) << ',' << detail::fmt_double(g.beta_im(j)) << ','
          << detail::fmt_double(g.at(i, j)) << '\n';

  json meta;
  meta["re_min"] = g.spec.re_min;
  meta["re_max"] = g.spec.re_max;
  meta["im_min"] = g.spec.im_min;
  meta["im_max"] = g.spec.im_max;
  meta["n_re"] = g.spec.n_re;
  meta["n_im"] = g.spec.n_im;
  meta["lambda_cutoff_re"] = g.lambda_cutoff_re;
  meta["lambda_cutoff_im"] = g.lambda_cutoff_im;
  meta["lambda_nodes_re"] = g.lambda_nodes_re;
  meta["lambda_nodes_im"] = g.lambda_nodes_im;
  meta["integral"] = g.integral();
  std::ofstream mo(path + ".meta.json");
  mo << meta.dump(2) << '\n';
}

/// Creates the run directory; refuses to reuse one holding a manifest unless
/// forced.
inline std::filesystem::path prepare_out_dir(const std::string& dir, bool force) {
  namespace fs = std::filesystem;
  const fs::path p(dir);
  if (fs::exists(p / "manifest.json") && !force)
    throw config_error("output directory already holds a run (use --force to overwrite): " + dir);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

struct FidelityEntry {
  double alpha = 0.0;
  CatParity parity = CatParity::even;
  double f = 0.0;
};

struct RunManifest {
  json config_echo;
  DerivedState derived;
  TwoModeCovariance sigma;
  double rc_used = 0.0;
  double p_r = 0.0;
  std::vector<FidelityEntry> fidelities;
  double n_m = 0.0;
  double leak = 0.0;
  double n_cr = 0.0;
  std::vector<std::string> artifacts;
  double wall_clock_s = 0.0;

  json to_json() const {
    json m;
    m["tool_version"] = version;
    m["config"] = config_echo;
    json der;
    der["nbar_th"] = derived.nbar_th;
    der["couplings_hz"] = {{"g1r", derived.couplings.g1r / two_pi},
                           {"g1b", derived.couplings.g1b / two_pi},
                           {"g2r", derived.couplings.g2r / two_pi},
                           {"g3r", derived.couplings.g3r / two_pi}};
    der["r_m"] = derived.mech_spec.r;
    der["mbar"] = derived.mech_spec.nbar;
    der["mech_moments"] = {derived.mech.a, derived.mech.b};
    der["transmissivity"] = derived.transmissivity;
    der["rc"] = rc_used;
    der["sigma"] = {sigma.s11, sigma.s22, sigma.s33, sigma.s44, sigma.s13, sigma.s24};
    json warn = json::array();
    for (const auto& w : derived.warnings)
      warn.push_back({{"message", w.message}, {"ratio", w.ratio}});
    der["timescale_warnings"] = warn;
    m["derived"] = der;
    json sc;
    sc["p_r"] = p_r;
    json fids = json::array();
    for (const auto& f : fidelities)
      fids.push_back({{"alpha", f.alpha},
                      {"parity", f.parity == CatParity::even ? "even" : "odd"},
                      {"fidelity", f.f}});
    sc["fidelities"] = fids;
    sc["n_m"] = n_m;
    sc["leak"] = leak;
    sc["n_cr"] = n_cr;
    m["scalars"] = sc;
    m["artifacts"] = artifacts;
    m["wall_clock_s"] = wall_clock_s;
    return m;
  }
};

/**
 * Full protocol run: steady-state squeezing, heralded subtraction, storage
 * decoherence, and swap readout. Writes the heralded and readout Wigner
 * grids plus manifest.json when out_dir is non-empty.
 */
inline RunManifest run_pipeline(const RunConfig& cfg, const json& config_echo,
                                const std::string& out_dir = "", bool force = false) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest man;
  man.config_echo = config_echo;
  man.derived = derive_state(cfg);
  const auto& num = cfg.task.numerics;

  double rc = 0.0;
  double t_used = man.derived.transmissivity;
  if (cfg.task.rc_mode == RcMode::fixed) rc = cfg.task.rc_value;
  if (cfg.task.rc_mode == RcMode::optimize) {
    if (cfg.task.alphas.empty()) throw config_error("rc_mode=optimize requires a target alpha");
    const auto mech = man.derived.mech;
    const int n = cfg.task.n;
    const double alpha = cfg.task.alphas.front();
    const auto res = maximize_fidelity(
        [&](double t, double r) { return herald_fidelity(mech, t, r, n, alpha, num); },
        OptimizeDomain{.rc_enabled = true});
    rc = res.rc_star;
    t_used = res.t_star;
    man.derived.transmissivity = t_used;
  }
  man.rc_used = rc;

  man.sigma = herald_sigma(man.derived.mech, t_used, rc);
  const ConditionalChi cond(man.sigma, cfg.task.n);
  man.p_r = cond.probability();

  const CatParity par = parity_of_count(cfg.task.n);
  for (double alpha : cfg.task.alphas) {
    const CatState cat{alpha, par};
    const double f =
        fidelity_chi_overlap(cond.chi(), cat_chi(cat), num.threads, 1e-12, num.grid_scale);
    man.fidelities.push_back({alpha, par, f});
  }

  const ChiFunction heralded = cond.chi();
  const WignerGrid gm = wigner_auto(heralded, num.threads, num.wigner_half_width,
                                    num.wigner_points, 1e-10, 1e-12, num.grid_scale);
  man.n_m = negativity(gm);

  const ReadoutMap map{man.derived.big_g3r, cfg.schedule.tau_rd};
  man.leak = map.leak();
  StoredState stored{heralded, cfg.schedule.tau_st, cfg.physical.gamma_m, man.derived.nbar_th};
  const ChiFunction out_chi = readout_chi(evolve_chi(stored), map);
  const WignerGrid gr = wigner_auto(out_chi, num.threads, num.wigner_half_width,
                                    num.wigner_points, 1e-10, 1e-12, num.grid_scale);
  man.n_cr = negativity(gr);

  if (!out_dir.empty()) {
    const auto dir = prepare_out_dir(out_dir, force);
    write_wigner_csv(gm, (dir / "wigner_heralded.csv").string());
    write_wigner_csv(gr, (dir / "wigner_readout.csv").string());
    man.artifacts = {"wigner_heralded.csv", "wigner_readout.csv"};
    man.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream mo(dir / "manifest.json");
    mo << man.to_json().dump(2) << '\n';
  } else {
    man.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return man;
}

/// Fidelity optimization entry point matching the protocol pairing: odd n
/// against odd cats, even n against even cats.
inline OptimizeResult optimize_fidelity(const SingleModeGaussian& mech, int n, double alpha,
                                        RcMode rc_mode, double rc_fixed = 0.0,
                                        const NumericsOptions& num = {},
                                        const OptimizeDomain& dom_in = {}) {
  OptimizeDomain dom = dom_in;
  dom.rc_enabled = (rc_mode == RcMode::optimize);
  if (rc_mode != RcMode::optimize) {
    dom.rc_lo = dom.rc_hi = (rc_mode == RcMode::fixed) ? rc_fixed : 0.0;
  }
  return maximize_fidelity(
      [&](double t, double rc) { return herald_fidelity(mech, t, rc, n, alpha, num); }, dom);
}

}  // namespace catmech
