#pragma once

#include <functional>
#include <utility>

#include "catmech/common.hpp"
#include "catmech/gaussian.hpp"

namespace catmech {

/**
 * Decay/oscillation metadata of a characteristic function, used to size
 * quadrature domains and node densities:
 *
 *   |chi(lambda)| <= exp(log_scale - gauss_re lr^2 - gauss_im li^2
 *                        + lin_re |lr| + lin_im |li|)
 *
 * up to polynomial factors (absorbed by a verified safety margin), with the
 * fastest phase oscillation osc_* (rad per unit lambda) along each axis.
 */
struct ChiEnvelope {
  double gauss_re = 0.5;
  double gauss_im = 0.5;
  double lin_re = 0.0;
  double lin_im = 0.0;
  double osc_re = 0.0;
  double osc_im = 0.0;
  double log_scale = 0.0;

  /// Domain half-width beyond which the envelope bound drops below eps.
  double cutoff_re(double eps) const { return cutoff(gauss_re, lin_re, eps); }
  double cutoff_im(double eps) const { return cutoff(gauss_im, lin_im, eps); }

 private:
  double cutoff(double g, double lin, double eps) const {
    if (!(g > 0.0)) throw std::domain_error("characteristic function does not decay");
    const double target = log_scale - std::log(eps);
    // g L^2 - lin L = target
    return (lin + std::sqrt(lin * lin + 4.0 * g * std::max(target, 1.0))) / (2.0 * g);
  }
};

/// A characteristic function chi(lambda) together with its envelope metadata.
struct ChiFunction {
  std::function<complexd(complexd)> eval;
  ChiEnvelope env;

  complexd operator()(complexd lambda) const { return eval(lambda); }
};

/// Zero-mean Gaussian chi with quadrature moments (A, B).
inline ChiFunction gaussian_chi(const SingleModeGaussian& m) {
  m.validate();
  ChiFunction f;
  const double a = m.a, b = m.b;
  f.eval = [a, b](complexd lam) -> complexd {
    return std::exp(-0.5 * (a * sq(lam.real()) + b * sq(lam.imag())));
  };
  f.env.gauss_re = a / 2.0;
  f.env.gauss_im = b / 2.0;
  return f;
}

/// Parity of a coherent-state superposition (|alpha> +/- |-alpha>).
enum class CatParity { even, odd };

inline CatParity parity_of_count(int n) { return (n % 2 == 0) ? CatParity::even : CatParity::odd; }

/// Schroedinger cat state along the real axis: amplitude alpha > 0, even (+)
/// or odd (-) superposition of |alpha> and |-alpha>.
struct CatState {
  double alpha = 1.0;
  CatParity parity = CatParity::even;

  void validate() const {
    if (!(alpha > 0.0)) throw config_error("cat amplitude must be > 0");
    if (parity == CatParity::odd && -std::expm1(-2.0 * alpha * alpha) <= 0.0)
      throw config_error("odd cat normalization vanishes");
  }
};

/**
 * Closed-form characteristic function of the cat state:
 *
 *   chi(lambda) = e^{-|lambda|^2/2} [cos(2 alpha li) +/- e^{-2 alpha^2}
 *                 cosh(2 alpha lr)] / (1 +/- e^{-2 alpha^2}).
 *
 * chi(0) = 1 by construction; the cosh cross-term carries the coherent blobs,
 * the cosine the interference fringes.
 */
inline ChiFunction cat_chi(const CatState& cat) {
  cat.validate();
  const double alpha = cat.alpha;
  const double sign = (cat.parity == CatParity::even) ? 1.0 : -1.0;
  const double e2a2 = std::exp(-2.0 * alpha * alpha);
  const double norm = (cat.parity == CatParity::even) ? (1.0 + e2a2) : (-std::expm1(-2.0 * alpha * alpha));
  ChiFunction f;
  f.eval = [alpha, sign, e2a2, norm](complexd lam) -> complexd {
    const double lr = lam.real(), li = lam.imag();
    return std::exp(-0.5 * (lr * lr + li * li)) *
           (std::cos(2.0 * alpha * li) + sign * e2a2 * std::cosh(2.0 * alpha * lr)) / norm;
  };
  f.env.gauss_re = 0.5;
  f.env.gauss_im = 0.5;
  f.env.lin_re = 2.0 * alpha;        // cosh growth before the Gaussian wins
  f.env.osc_im = 2.0 * alpha;        // fringe frequency
  f.env.log_scale = std::log(2.0 / norm);
  return f;
}

}  // namespace catmech
