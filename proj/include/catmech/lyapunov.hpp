#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "catmech/common.hpp"
#include "catmech/gaussian.hpp"

namespace catmech {

/**
 * Exact steady covariance of the linearized two-pulse (red + blue) dynamics,
 * used as the independent oracle for steady_state_squeezing.
 *
 * Quadrature vector u = (x_a, p_a, x_b, p_b); the covariance V solves
 * M V + V M^T + D = 0 with the drift of the damped cavity/mechanics pair and
 * diffusion D = diag(kappa/2, kappa/2, gamma(2 nbar + 1)/2, ...).
 */
struct LyapunovSteadyState {
  Eigen::Matrix4d covariance;  // symmetrized <u u^T>

  /// Mechanical moments in the (A, B) convention used downstream:
  /// A maps to the quadrature squeezed by the phi = pi steady state.
  SingleModeGaussian mechanical_moments() const {
    return {2.0 * covariance(2, 2), 2.0 * covariance(3, 3), ModeTag::mechanical};
  }
  SingleModeGaussian cavity_moments() const {
    return {2.0 * covariance(0, 0), 2.0 * covariance(1, 1), ModeTag::cavity};
  }
};

inline LyapunovSteadyState lyapunov_steady_state(double g1r, double g1b, double kappa_c,
                                                 double gamma_m, double nbar_th) {
  if (g1r < 0 || g1b < 0) throw config_error("couplings must be >= 0");
  if (!(kappa_c > 0) || !(gamma_m > 0)) throw config_error("rates must be > 0");
  if (nbar_th < 0) throw config_error("nbar_th must be >= 0");

  const double gm = g1r - g1b;  // beam-splitter-minus-parametric weight
  const double gp = g1r + g1b;

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = -kappa_c / 2.0;
  m(0, 3) = gm;
  m(1, 1) = -kappa_c / 2.0;
  m(1, 2) = -gp;
  m(2, 2) = -gamma_m / 2.0;
  m(2, 1) = gm;
  m(3, 3) = -gamma_m / 2.0;
  m(3, 0) = -gp;

  const Eigen::EigenSolver<Eigen::Matrix4d> es(m);
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues()(i).real() >= 0.0)
      throw instability_error("drift matrix is not Hurwitz; no steady state exists");
  }

  Eigen::Vector4d diff;
  diff << kappa_c / 2.0, kappa_c / 2.0, gamma_m * (2.0 * nbar_th + 1.0) / 2.0,
      gamma_m * (2.0 * nbar_th + 1.0) / 2.0;

  // vec(M V + V M^T) = (I (x) M + M (x) I) vec(V) = -vec(D)
  Eigen::Matrix<double, 16, 16> k = Eigen::Matrix<double, 16, 16>::Zero();
  const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          k(4 * i + a, 4 * j + b) = id(i, j) * m(a, b) + m(i, j) * id(a, b);

  Eigen::Matrix<double, 16, 1> rhs = Eigen::Matrix<double, 16, 1>::Zero();
  for (int i = 0; i < 4; ++i) rhs(4 * i + i) = -diff(i);

  const Eigen::Matrix<double, 16, 1> v = k.colPivHouseholderQr().solve(rhs);
  LyapunovSteadyState out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.covariance(i, j) = v(4 * i + j);
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

}  // namespace catmech
