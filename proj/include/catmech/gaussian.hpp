#pragma once

#include "catmech/common.hpp"

namespace catmech {

enum class ModeTag { mechanical, cavity };

/**
 * Zero-mean single-mode Gaussian state summarized by its two quadrature
 * moments in the characteristic-function picture:
 *
 *   chi(lambda) = exp(-(A lambda_r^2 + B lambda_i^2) / 2),
 *
 * with A = 2<o^dag o> - 2<o^2> + 1 and B = 2<o^dag o> + 2<o^2> + 1.
 * Vacuum is (A, B) = (1, 1); A B >= 1 is the uncertainty bound, with
 * equality iff the state is pure.
 */
struct SingleModeGaussian {
  double a = 1.0;
  double b = 1.0;
  ModeTag tag = ModeTag::mechanical;

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0)) throw config_error("Gaussian moments must be positive");
    if (a * b < 1.0 - 1e-12) throw config_error("Gaussian moments violate the uncertainty bound");
  }
  bool pure(double tol = 1e-9) const { return std::abs(a * b - 1.0) < tol; }
};

/// Squeezed thermal state parameters. Only the squeezing angles 0 and pi are
/// meaningful here (squeezing aligned with one of the two quadratures).
struct SqueezedThermalSpec {
  double r = 0.0;    ///< squeezing degree, >= 0
  double phi = 0.0;  ///< squeezing angle, 0 or pi
  double nbar = 0.0; ///< thermal occupancy of the pre-squeeze state, >= 0

  void validate() const {
    if (r < 0.0) throw config_error("squeezing degree must be >= 0");
    if (nbar < 0.0) throw config_error("thermal occupancy must be >= 0");
  }
};

/// Quadrature moments of a squeezed thermal state. phi = pi squeezes A
/// (A = (2 nbar + 1) e^{-2r}), phi = 0 squeezes B.
inline SingleModeGaussian squeezed_thermal_moments(const SqueezedThermalSpec& s,
                                                   ModeTag tag = ModeTag::mechanical) {
  s.validate();
  const double scale = 2.0 * s.nbar + 1.0;
  const bool at_pi = std::abs(s.phi - pi) < 1e-12;
  const bool at_zero = std::abs(s.phi) < 1e-12;
  if (!at_pi && !at_zero)
    throw config_error("squeezed_thermal_moments: only squeezing angles 0 and pi are supported");
  SingleModeGaussian m;
  m.tag = tag;
  if (at_pi) {
    m.a = scale * std::exp(-2.0 * s.r);
    m.b = scale * std::exp(2.0 * s.r);
  } else {
    m.a = scale * std::exp(2.0 * s.r);
    m.b = scale * std::exp(-2.0 * s.r);
  }
  return m;
}

/**
 * Steady state of the resonator under simultaneous red/blue driving with the
 * cavity adiabatically carrying away entropy: a squeezed thermal state with
 *
 *   r = atanh(g_1b / g_1r),   phi = pi,
 *   mbar = gamma nbar [4 g^2 + kappa (kappa + gamma)] /
 *          [(kappa + gamma)(4 g^2 + kappa gamma)],   g^2 = g_1r^2 - g_1b^2.
 *
 * mbar is exact for the pure-cooling case g_1b = 0 and reduces to
 * gamma nbar / (gamma + 4 g^2 / kappa) deep in the adiabatic regime; for
 * g_1b > 0 the squeezed-thermal form itself is the adiabatic limit of the
 * exact Lyapunov covariance (see lyapunov_closed_form_gap for the exact
 * residual).
 */
inline SqueezedThermalSpec steady_state_squeezing(double g1r, double g1b, double kappa_c,
                                                  double gamma_m, double nbar_th) {
  if (g1r < 0 || g1b < 0) throw config_error("couplings must be >= 0");
  if (!(kappa_c > 0) || !(gamma_m > 0)) throw config_error("rates must be > 0");
  if (nbar_th < 0) throw config_error("nbar_th must be >= 0");
  if (!(g1b < g1r)) throw instability_error("squeezing stage unstable: requires g_1b < g_1r");
  const double g2 = g1r * g1r - g1b * g1b;
  SqueezedThermalSpec s;
  s.r = std::atanh(g1b / g1r);
  s.phi = pi;
  s.nbar = gamma_m * nbar_th * (4.0 * g2 + kappa_c * (kappa_c + gamma_m)) /
           ((kappa_c + gamma_m) * (4.0 * g2 + kappa_c * gamma_m));
  return s;
}

/// Exact gap between the squeezed-thermal closed form above and the exact
/// steady covariance of the linearized dynamics: closed-form A (resp. B)
/// exceeds the exact moment by gap_a (gap_b).
inline void lyapunov_closed_form_gap(double g1r, double g1b, double kappa_c, double gamma_m,
                                     double nbar_th, double& gap_a, double& gap_b) {
  const double g2 = g1r * g1r - g1b * g1b;
  const double r = std::atanh(g1b / g1r);
  const double s = kappa_c * (kappa_c + gamma_m) + 4.0 * g2;
  const double d = (kappa_c + gamma_m) * (4.0 * g2 + kappa_c * gamma_m);
  const double common = gamma_m * (2.0 * nbar_th + 1.0) * s / d;
  gap_a = common * (std::exp(-2.0 * r) - 1.0);
  gap_b = common * (std::exp(2.0 * r) - 1.0);
}

/**
 * Correlation matrix of the two output temporal modes of the effective beam
 * splitter, over x = (eta_r, eta_i, zeta_r, zeta_i) with eta the mechanical
 * and zeta the optical output argument:
 *
 *   chi_out(eta, zeta) = exp(-x sigma x^T / 2).
 *
 * Only the six elements below are nonzero for aligned squeezed inputs.
 */
struct TwoModeCovariance {
  double s11 = 1, s22 = 1, s33 = 1, s44 = 1, s13 = 0, s24 = 0;

  double f1() const { return (s33 + 1.0) / 2.0; }
  double f2() const { return (s44 + 1.0) / 2.0; }

  void validate() const {
    if (!(s11 > 0) || !(s22 > 0) || !(s33 > 0) || !(s44 > 0))
      throw config_error("covariance diagonal must be positive");
    if (s11 * s33 - s13 * s13 <= 0.0 || s22 * s44 - s24 * s24 <= 0.0)
      throw config_error("covariance sub-blocks must be positive definite");
  }
  double trace() const { return s11 + s22 + s33 + s44; }
};

/// Mixes the mechanical and cavity input moments on the effective beam
/// splitter with *amplitude* transmissivity t in (0, 1]. Intensity weights
/// are t^2 and 1 - t^2.
inline TwoModeCovariance assemble_output_covariance(const SingleModeGaussian& mech,
                                                    const SingleModeGaussian& cav,
                                                    double t_amplitude) {
  mech.validate();
  cav.validate();
  if (!(t_amplitude > 0.0) || t_amplitude > 1.0)
    throw config_error("transmissivity amplitude must be in (0, 1]");
  const double t2 = t_amplitude * t_amplitude;
  const double r2 = 1.0 - t2;
  const double tr = t_amplitude * std::sqrt(r2);
  TwoModeCovariance s;
  s.s11 = mech.a * t2 + cav.a * r2;
  s.s22 = mech.b * t2 + cav.b * r2;
  s.s33 = mech.a * r2 + cav.a * t2;
  s.s44 = mech.b * r2 + cav.b * t2;
  s.s13 = tr * (mech.a - cav.a);
  s.s24 = tr * (mech.b - cav.b);
  s.validate();
  return s;
}

}  // namespace catmech
