#pragma once

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/quadrature.hpp"
#include "catmech/wigner.hpp"

namespace catmech {

/**
 * A heralded state held in the resonator while it thermalizes with the
 * mechanical bath. The damping channel acts in closed form on the
 * characteristic function:
 *
 *   chi(lambda, t) = exp[(nbar + 1/2)(e^{-gamma t} - 1) |lambda|^2]
 *                    chi(lambda e^{-gamma t / 2}, 0).
 */
struct StoredState {
  ChiFunction base;      ///< chi at the end of the subtraction step
  double tau_st = 0.0;   ///< storage time (s)
  double gamma_m = 0.0;  ///< mechanical damping rate (rad/s)
  double nbar_th = 0.0;  ///< bath occupancy

  void validate() const {
    if (tau_st < 0.0) throw config_error("storage time must be >= 0");
    if (!(gamma_m >= 0.0)) throw config_error("gamma_m must be >= 0");
    if (nbar_th < 0.0) throw config_error("nbar_th must be >= 0");
  }
};

/// chi of the stored state at a single point.
inline complexd evolve_chi(const StoredState& s, complexd lambda) {
  s.validate();
  const double decay = std::exp(-s.gamma_m * s.tau_st);
  const double thermal = (s.nbar_th + 0.5) * (decay - 1.0) * std::norm(lambda);
  return std::exp(thermal) * s.base(lambda * std::sqrt(decay));
}

/// chi of the stored state as an envelope-tagged function.
inline ChiFunction evolve_chi(const StoredState& s) {
  s.validate();
  const double decay = std::exp(-s.gamma_m * s.tau_st);
  const double mix = (s.nbar_th + 0.5) * (1.0 - decay);
  ChiFunction f;
  f.eval = [s, decay, mix](complexd lam) -> complexd {
    return std::exp(-mix * std::norm(lam)) * s.base(lam * std::sqrt(decay));
  };
  f.env.gauss_re = s.base.env.gauss_re * decay + mix;
  f.env.gauss_im = s.base.env.gauss_im * decay + mix;
  f.env.lin_re = s.base.env.lin_re * std::sqrt(decay);
  f.env.lin_im = s.base.env.lin_im * std::sqrt(decay);
  f.env.osc_re = s.base.env.osc_re * std::sqrt(decay);
  f.env.osc_im = s.base.env.osc_im * std::sqrt(decay);
  f.env.log_scale = s.base.env.log_scale;
  return f;
}

/**
 * State-swap readout: a red pulse maps the stored phononic state onto the
 * cavity output pulse. A fraction `leak` = e^{-G_3r tau_rd} of the amplitude
 * stays behind, so the output sees the mechanical chi at argument
 * sqrt(1 - leak^2) zeta blended with a vacuum Gaussian of weight leak.
 */
struct ReadoutMap {
  double big_g3r = 0.0;  ///< adiabatic swap rate of the readout pulse (rad/s)
  double tau_rd = 0.0;   ///< readout pulse duration (s)

  double leak() const { return std::exp(-big_g3r * tau_rd); }
  void validate() const {
    if (big_g3r < 0.0 || tau_rd < 0.0) throw config_error("readout map parameters must be >= 0");
  }
};

inline ChiFunction readout_chi(const ChiFunction& stored, const ReadoutMap& map) {
  map.validate();
  const double leak = map.leak();
  const double transfer = std::sqrt(std::max(0.0, 1.0 - leak * leak));
  ChiFunction f;
  f.eval = [stored, leak, transfer](complexd zeta) -> complexd {
    return stored(transfer * zeta) * std::exp(-0.5 * leak * leak * std::norm(zeta));
  };
  const double t2 = transfer * transfer, l2h = leak * leak / 2.0;
  f.env.gauss_re = stored.env.gauss_re * t2 + l2h;
  f.env.gauss_im = stored.env.gauss_im * t2 + l2h;
  f.env.lin_re = stored.env.lin_re * transfer;
  f.env.lin_im = stored.env.lin_im * transfer;
  f.env.osc_re = stored.env.osc_re * transfer;
  f.env.osc_im = stored.env.osc_im * transfer;
  f.env.log_scale = stored.env.log_scale;
  return f;
}

/// Negativity of the readout field: storage decoherence, then the swap map,
/// then the Wigner transform on an auto-expanded grid.
inline double readout_negativity(const ChiFunction& heralded, double tau_st, double gamma_m,
                                 double nbar_th, const ReadoutMap& map, int threads = 1,
                                 double half_width = 6.0, int n_points = 301,
                                 double density_scale = 1.0) {
  StoredState s{heralded, tau_st, gamma_m, nbar_th};
  const ChiFunction out = readout_chi(evolve_chi(s), map);
  const WignerGrid g =
      wigner_auto(out, threads, half_width, n_points, 1e-10, 1e-12, density_scale);
  return negativity(g);
}

}  // namespace catmech
