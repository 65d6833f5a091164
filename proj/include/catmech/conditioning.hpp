#pragma once

#include <vector>

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/gaussian.hpp"
#include "catmech/quadrature.hpp"
#include "catmech/special.hpp"

namespace catmech {

namespace detail {

/// (k, l)-term weights of the conditioning double sum:
///   w_kl = (-1)^k C(n,k)/k! C(k,l) F1^{-1/2-l} F2^{-1/2-k+l}
///          Gamma(1/2+l) Gamma(1/2+k-l).
/// Evaluated against a common logarithmic offset so that deeply attenuated
/// heralds stay representable.
struct ConditioningTable {
  int n = 0;
  std::vector<double> w;    // scaled weights, index k*(k+1)/2 + l
  double log_offset = 0.0;  // true weight = w * exp(log_offset)
  double sum0 = 0.0;        // sum of scaled weights (the lambda = 0 value)

  double weight(int k, int l) const { return w[static_cast<size_t>(k) * (k + 1) / 2 + l]; }
};

inline ConditioningTable build_conditioning_table(int n, double f1, double f2) {
  if (n < 0) throw config_error("photon count must be a non-negative integer");
  if (!(f1 > 0.5) || !(f2 > 0.5))
    throw config_error("detected-mode moments must exceed the vacuum floor");
  ConditioningTable t;
  t.n = n;
  t.log_offset = -0.5 * (std::log(f1) + std::log(f2));
  const double lf1 = std::log(f1), lf2 = std::log(f2);
  t.w.reserve(static_cast<size_t>(n + 1) * (n + 2) / 2);
  kahan_sum s0;
  for (int k = 0; k <= n; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double logmag = -l * lf1 - (k - l) * lf2;
      const double val = ((k % 2 == 0) ? 1.0 : -1.0) * binomial(n, k) *
                         std::exp(-log_factorial(k) + logmag) * binomial(k, l) *
                         gamma_half_integer(l) * gamma_half_integer(k - l);
      t.w.push_back(val);
      s0.add(val);
    }
  }
  t.sum0 = s0.value();
  return t;
}

}  // namespace detail

/// Probability of counting exactly n photons in the detected output mode of
/// the beam-splitter state sigma. Depends only on the detected-mode moments
/// through F_j = (sigma_{j+2,j+2} + 1)/2.
inline double detection_probability(const TwoModeCovariance& sigma, int n) {
  sigma.validate();
  const auto t = detail::build_conditioning_table(n, sigma.f1(), sigma.f2());
  return t.sum0 * std::exp(t.log_offset) / pi;
}

/**
 * Full count distribution P(0..max_n) of the detected mode, generated by the
 * recurrence of its probability generating function
 *
 *   G(x) = [(1 + a(1-x))(1 + b(1-x))]^{-1/2},  a = F1 - 1, b = F2 - 1,
 *
 * i.e. F1 F2 (n+1) P(n+1) = (a F2 + b F1)(n + 1/2) P(n) - a b n P(n-1).
 * Unlike the alternating double sum this stays at machine precision deep
 * into the tail, which the completeness check needs.
 */
inline std::vector<double> detection_probability_sequence(const TwoModeCovariance& sigma,
                                                          int max_n) {
  sigma.validate();
  if (max_n < 0) throw config_error("photon count must be a non-negative integer");
  const double f1 = sigma.f1(), f2 = sigma.f2();
  const double a = f1 - 1.0, b = f2 - 1.0;
  std::vector<double> p(static_cast<size_t>(max_n) + 1);
  p[0] = 1.0 / std::sqrt(f1 * f2);
  if (max_n >= 1) p[1] = p[0] * 0.5 * (a / f1 + b / f2);
  for (int n = 1; n < max_n; ++n)
    p[n + 1] = ((a * f2 + b * f1) * (n + 0.5) * p[n] - a * b * n * p[n - 1]) / (f1 * f2 * (n + 1));
  return p;
}

/**
 * The heralded mechanical state after counting n photons, represented by its
 * closed-form characteristic function: a Gaussian envelope times a double sum
 * of terminating Kummer polynomials in lambda_r^2 and lambda_i^2, normalized
 * so chi(0) = 1. The herald probability equals 1/norm.
 */
class ConditionalChi {
 public:
  ConditionalChi(const TwoModeCovariance& sigma, int n, double min_probability = 1e-280)
      : sigma_(sigma), n_(n) {
    sigma.validate();
    table_ = detail::build_conditioning_table(n, sigma.f1(), sigma.f2());
    prob_ = table_.sum0 * std::exp(table_.log_offset) / pi;
    if (!(prob_ > min_probability))
      throw herald_error("herald outcome has (numerically) zero probability");
    if (!(table_.sum0 > 0.0))
      throw herald_error("conditioning sum is non-positive; outcome unattainable");
    env_re_ = sigma.s11 - sq(sigma.s13) / (2.0 * sigma.f1());
    env_im_ = sigma.s22 - sq(sigma.s24) / (2.0 * sigma.f2());
    if (!(env_re_ > 0.0) || !(env_im_ > 0.0))
      throw config_error("conditioned envelope fails to decay; invalid covariance");
    arg_re_ = sq(sigma.s13) / (4.0 * sigma.f1());
    arg_im_ = sq(sigma.s24) / (4.0 * sigma.f2());
  }

  int count() const { return n_; }
  double probability() const { return prob_; }
  double norm() const { return 1.0 / prob_; }
  const TwoModeCovariance& sigma() const { return sigma_; }

  complexd operator()(complexd lambda) const {
    const double lr = lambda.real(), li = lambda.imag();
    // per-axis Kummer stacks are shared by every (k, l) term
    double mr[kMaxCount + 1], mi[kMaxCount + 1];
    const int n = n_;
    if (n > kMaxCount) throw config_error("photon count beyond supported range");
    for (int l = 0; l <= n; ++l) {
      mr[l] = kummer_terminating(l, -arg_re_ * lr * lr);
      mi[l] = kummer_terminating(l, -arg_im_ * li * li);
    }
    kahan_sum s;
    for (int k = 0; k <= n; ++k)
      for (int l = 0; l <= k; ++l) s.add(table_.weight(k, l) * mr[l] * mi[k - l]);
    const double envelope = std::exp(-0.5 * env_re_ * lr * lr - 0.5 * env_im_ * li * li);
    return envelope * s.value() / table_.sum0;
  }

  /// Envelope-tagged closure for the phase-space machinery.
  ChiFunction chi() const {
    ChiFunction f;
    f.eval = [state = *this](complexd lam) { return state(lam); };
    f.env.gauss_re = env_re_ / 2.0;
    f.env.gauss_im = env_im_ / 2.0;
    return f;
  }

  static constexpr int kMaxCount = 32;

  double envelope_re() const { return env_re_; }
  double envelope_im() const { return env_im_; }
  double kummer_arg_re() const { return arg_re_; }
  double kummer_arg_im() const { return arg_im_; }
  const detail::ConditioningTable& table() const { return table_; }

 private:
  TwoModeCovariance sigma_;
  int n_;
  detail::ConditioningTable table_;
  double prob_ = 0.0;
  double env_re_ = 0.0, env_im_ = 0.0;
  double arg_re_ = 0.0, arg_im_ = 0.0;
};

/**
 * Fidelity of the heralded state to a cat, evaluated through the separable
 * structure of the overlap integrand: each (k, l) term and each of the two
 * cat components factorizes over the axes, so the 2-D overlap collapses to
 * four families of 1-D Gaussian-polynomial integrals. Agrees with the
 * generic fidelity_chi_overlap to quadrature accuracy at a fraction of the
 * cost; used by the optimizer and figure sweeps.
 */
inline double fidelity_to_cat(const ConditionalChi& cond, const CatState& cat,
                              double density_scale = 1.0) {
  cat.validate();
  const int n = cond.count();
  const double alpha = cat.alpha;
  const double sign = (cat.parity == CatParity::even) ? 1.0 : -1.0;
  const double e2a2 = std::exp(-2.0 * alpha * alpha);
  const double cat_norm =
      (cat.parity == CatParity::even) ? (1.0 + e2a2) : (-std::expm1(-2.0 * alpha * alpha));

  // axis setups: combined Gaussian decay, cosh boost on the real axis,
  // fringe oscillation on the imaginary axis
  const double g_re = (cond.envelope_re() + 1.0) / 2.0;
  const double g_im = (cond.envelope_im() + 1.0) / 2.0;
  ChiEnvelope env_r{g_re, g_re, 2.0 * alpha, 0.0, 0.0, 0.0, std::log(2.0)};
  ChiEnvelope env_i{g_im, g_im, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double lr = env_r.cutoff_re(1e-13) + 1.0;
  const double li = env_i.cutoff_im(1e-13) + 1.0;
  const auto ax_r = quadrature::make_axis(lr, g_re, 2.0 * alpha, density_scale);
  const auto ax_i = quadrature::make_axis(li, g_im, 2.0 * alpha, density_scale);

  std::vector<double> r0(n + 1, 0.0), rcosh(n + 1, 0.0), i0(n + 1, 0.0), icos(n + 1, 0.0);
  const double er = cond.envelope_re(), ei = cond.envelope_im();
  const double ur = cond.kummer_arg_re(), ui = cond.kummer_arg_im();
  for (size_t q = 0; q < ax_r.x.size(); ++q) {
    const double x = ax_r.x[q];
    const double base = ax_r.w[q] * std::exp(-0.5 * (er + 1.0) * x * x);
    const double ch = std::cosh(2.0 * alpha * x);
    for (int l = 0; l <= n; ++l) {
      const double m = kummer_terminating(l, -ur * x * x);
      r0[l] += base * m;
      rcosh[l] += base * m * ch;
    }
  }
  for (size_t q = 0; q < ax_i.x.size(); ++q) {
    const double y = ax_i.x[q];
    const double base = ax_i.w[q] * std::exp(-0.5 * (ei + 1.0) * y * y);
    const double cs = std::cos(2.0 * alpha * y);
    for (int p = 0; p <= n; ++p) {
      const double m = kummer_terminating(p, -ui * y * y);
      i0[p] += base * m;
      icos[p] += base * m * cs;
    }
  }

  kahan_sum acc;
  for (int k = 0; k <= n; ++k)
    for (int l = 0; l <= k; ++l)
      acc.add(cond.table().weight(k, l) *
              (r0[l] * icos[k - l] + sign * e2a2 * rcosh[l] * i0[k - l]));
  const double f = acc.value() / (pi * cond.table().sum0 * cat_norm);
  return std::max(0.0, f);
}

}  // namespace catmech
