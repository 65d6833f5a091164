#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catmech/common.hpp"

namespace catmech {

/**
 * Static constants of the optomechanical device. All rates and frequencies
 * are angular (rad/s); config files speak in ordinary frequency (Hz) and are
 * converted on ingestion.
 */
struct PhysicalParams {
  double omega_m = 0.0;                ///< mechanical resonance (rad/s)
  std::optional<double> omega_c;       ///< cavity resonance (rad/s), needed only for drive powers
  double kappa_c = 0.0;                ///< cavity energy decay rate (rad/s)
  double gamma_m = 0.0;                ///< mechanical damping rate (rad/s)
  double g0 = 0.0;                     ///< single-photon coupling (rad/s)
  double temperature = 0.0;            ///< bath temperature (K)

  void validate() const {
    if (!(omega_m > 0.0)) throw config_error("omega_m must be > 0");
    if (omega_c && !(*omega_c > 0.0)) throw config_error("omega_c must be > 0 when given");
    if (!(kappa_c > 0.0)) throw config_error("kappa_c must be > 0");
    if (!(gamma_m > 0.0)) throw config_error("gamma_m must be > 0");
    if (!(g0 > 0.0)) throw config_error("g0 must be > 0");
    if (temperature < 0.0) throw config_error("temperature must be >= 0");
  }
};

/// Flat-top drive powers for the three pulse stages (W).
struct DrivePowers {
  double p1r = 0.0, p1b = 0.0, p2r = 0.0, p3r = 0.0;
};

/// Collective (cavity-enhanced) couplings, the canonical internal form (rad/s).
struct DriveCouplings {
  double g1r = 0.0, g1b = 0.0, g2r = 0.0, g3r = 0.0;
};

/// Pulse sequence: squeezing pair, wait, subtraction, storage, readout.
struct PulseSchedule {
  double tau_rb = 0.0;  ///< squeezing pulse-pair duration (s)
  double tau_wt = 0.0;  ///< waiting time (s)
  double tau_ps = 0.0;  ///< subtraction pulse duration (s)
  double tau_st = 0.0;  ///< storage time (s)
  double tau_rd = 0.0;  ///< readout pulse duration (s)
  std::variant<DrivePowers, DriveCouplings> drives = DriveCouplings{};

  void validate() const {
    if (tau_rb < 0 || tau_wt < 0 || tau_ps < 0 || tau_st < 0 || tau_rd < 0)
      throw config_error("pulse durations must be >= 0");
  }
};

/// Mean phonon occupancy of a bath at temperature T seen by a mode at omega_m.
/// Returns 0 in the T = 0 limit.
inline double thermal_occupancy(double omega_m, double temperature) {
  if (!(omega_m > 0.0)) throw config_error("thermal_occupancy: omega_m must be > 0");
  if (temperature < 0.0) throw config_error("thermal_occupancy: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = hbar * omega_m / (k_boltzmann * temperature);
  // 1/(e^x - 1), stable for both tails
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

/// Collective coupling g = g0 sqrt(n_drive) for a resolved-sideband drive of
/// the given power. Needs omega_c; intracavity photon number
/// n = P kappa_c / [hbar omega_c (omega_m^2 + kappa_c^2/4)].
inline double collective_coupling(double power, const PhysicalParams& p) {
  if (power < 0.0) throw config_error("drive power must be >= 0");
  if (!p.omega_c)
    throw config_error(
        "collective_coupling: omega_c not set; either supply omega_c_hz (or rely on the "
        "default 1550 nm cavity) or specify the couplings directly");
  const double n = power * p.kappa_c / (hbar * *p.omega_c * (sq(p.omega_m) + sq(p.kappa_c) / 4.0));
  return p.g0 * std::sqrt(n);
}

/// Adiabatic swap rate G = 4 g^2 / kappa_c of a red pulse in the bad-cavity limit.
inline double adiabatic_rate(double g, double kappa_c) {
  if (!(kappa_c > 0.0)) throw config_error("adiabatic_rate: kappa_c must be > 0");
  return 4.0 * g * g / kappa_c;
}

/// Amplitude transmissivity e^{-G tau} of the effective beam splitter realized
/// by a red pulse of duration tau. The corresponding intensity weight is its
/// square.
inline double transmissivity(double big_g, double tau) {
  if (big_g < 0.0 || tau < 0.0) throw config_error("transmissivity: G and tau must be >= 0");
  return std::exp(-big_g * tau);
}

struct TimescaleWarning {
  std::string message;
  double ratio;  ///< achieved ratio for the violated "much less than" (target >= 10)
};

namespace detail {
inline void check_much_less(double small, double large, const char* what,
                            std::vector<TimescaleWarning>& out) {
  // "a << b" operationalized as b/a >= 10
  if (!(small > 0.0)) return;  // zero durations are caught elsewhere
  const double ratio = large / small;
  if (ratio < 10.0) out.push_back({std::string(what), ratio});
}
}  // namespace detail

/// Checks the pulse-duration hierarchy the protocol relies on
/// (kappa_c^{-1} << tau_pulse << gamma_m^{-1}, and the total protocol time
/// short against the mechanical lifetime). Emits one warning per violated
/// inequality; never throws.
inline std::vector<TimescaleWarning> validate_timescales(const PhysicalParams& p,
                                                         const PulseSchedule& s) {
  std::vector<TimescaleWarning> w;
  detail::check_much_less(1.0 / p.kappa_c, s.tau_rb, "1/kappa_c << tau_rb violated", w);
  detail::check_much_less(1.0 / p.kappa_c, s.tau_ps, "1/kappa_c << tau_ps violated", w);
  detail::check_much_less(1.0 / p.kappa_c, s.tau_rd, "1/kappa_c << tau_rd violated", w);
  detail::check_much_less(s.tau_rb, 1.0 / p.gamma_m, "tau_rb << 1/gamma_m violated", w);
  detail::check_much_less(s.tau_ps, 1.0 / p.gamma_m, "tau_ps << 1/gamma_m violated", w);
  detail::check_much_less(s.tau_rd, 1.0 / p.gamma_m, "tau_rd << 1/gamma_m violated", w);
  const double total = s.tau_rb + s.tau_ps + s.tau_st + s.tau_rd;
  detail::check_much_less(total, 1.0 / p.gamma_m,
                          "tau_rb + tau_ps + tau_st + tau_rd << 1/gamma_m violated", w);
  return w;
}

/// Resolves the drive specification to collective couplings. Power-based
/// specs require omega_c. Checks the parametric stability condition
/// g_1b < g_1r of the squeezing stage.
inline DriveCouplings resolve_couplings(const PhysicalParams& p, const PulseSchedule& s) {
  DriveCouplings g;
  if (std::holds_alternative<DriveCouplings>(s.drives)) {
    g = std::get<DriveCouplings>(s.drives);
  } else {
    const auto& pw = std::get<DrivePowers>(s.drives);
    g.g1r = collective_coupling(pw.p1r, p);
    g.g1b = collective_coupling(pw.p1b, p);
    g.g2r = collective_coupling(pw.p2r, p);
    g.g3r = collective_coupling(pw.p3r, p);
  }
  if (g.g1r < 0 || g.g1b < 0 || g.g2r < 0 || g.g3r < 0)
    throw config_error("couplings must be >= 0");
  if (!(g.g1b < g.g1r))
    throw instability_error("squeezing stage unstable: requires g_1b < g_1r");
  return g;
}

}  // namespace catmech
