#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "catmech/chi.hpp"
#include "catmech/common.hpp"

namespace catmech {
namespace quadrature {

/// Gauss-Legendre nodes/weights on [-1, 1], Newton-refined from the
/// Chebyshev estimate. Deterministic; cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::scoped_lock lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

/// One integration axis: composite Gauss-Legendre panels over [-L, L].
struct Axis {
  std::vector<double> x, w;
  double cutoff = 0.0;
};

/// Builds an axis resolving a Gaussian of decay coefficient `gauss`
/// (exp(-gauss t^2) scale) and phase oscillations up to `osc` rad per unit.
inline Axis make_axis(double cutoff, double gauss, double osc, double density_scale = 1.0) {
  constexpr int kNodesPerPanel = 12;
  const double smooth_width = 1.0 / std::sqrt(std::max(gauss, 1e-6));
  double panel = std::min(1.6 * smooth_width, 8.0);
  if (osc > 0.0) panel = std::min(panel, (kNodesPerPanel - 5) / osc);
  panel /= density_scale;
  const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * cutoff / panel)));
  const auto& [gx, gw] = gauss_legendre(kNodesPerPanel);
  Axis a;
  a.cutoff = cutoff;
  a.x.reserve(static_cast<size_t>(panels) * kNodesPerPanel);
  a.w.reserve(static_cast<size_t>(panels) * kNodesPerPanel);
  const double h = 2.0 * cutoff / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = -cutoff + p * h;
    const double mid = lo + h / 2.0, half = h / 2.0;
    for (int i = 0; i < kNodesPerPanel; ++i) {
      a.x.push_back(mid + half * gx[i]);
      a.w.push_back(half * gw[i]);
    }
  }
  return a;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Outputs must go to
/// preassigned slots so results are independent of the thread count.
template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace quadrature

/// Cutoff of chi (where the envelope drops under eps), verified against the
/// actual values and widened until |chi| < 10 eps on the boundary probes.
inline void verified_cutoffs(const ChiFunction& chi, double eps, double& lr, double& li) {
  lr = chi.env.cutoff_re(eps);
  li = chi.env.cutoff_im(eps);
  for (int iter = 0; iter < 12; ++iter) {
    double worst = 0.0;
    for (double f : {1.0, 0.6, 0.25}) {
      worst = std::max(worst, std::abs(chi({lr, f * li})));
      worst = std::max(worst, std::abs(chi({f * lr, li})));
    }
    if (worst < 10.0 * eps) return;
    lr *= 1.25;
    li *= 1.25;
  }
  throw convergence_error("characteristic function does not decay below the quadrature cutoff");
}

/**
 * Hilbert-Schmidt overlap of two states from their characteristic functions,
 *
 *   F = (1/pi) integral chi_a(lambda) chi_b(-lambda) d^2 lambda,
 *
 * equal to the fidelity when at least one state is pure. Tiny negative
 * round-off is clamped to zero.
 */
inline double fidelity_chi_overlap(const ChiFunction& a, const ChiFunction& b, int threads = 1,
                                   double eps = 1e-12, double density_scale = 1.0) {
  ChiFunction prod;
  prod.env.gauss_re = a.env.gauss_re + b.env.gauss_re;
  prod.env.gauss_im = a.env.gauss_im + b.env.gauss_im;
  prod.env.lin_re = a.env.lin_re + b.env.lin_re;
  prod.env.lin_im = a.env.lin_im + b.env.lin_im;
  prod.env.osc_re = a.env.osc_re + b.env.osc_re;
  prod.env.osc_im = a.env.osc_im + b.env.osc_im;
  prod.env.log_scale = a.env.log_scale + b.env.log_scale;
  prod.eval = [&a, &b](complexd lam) { return a(lam) * b(-lam); };

  double lr, li;
  verified_cutoffs(prod, eps, lr, li);
  const auto ax_r = quadrature::make_axis(lr, prod.env.gauss_re, prod.env.osc_re, density_scale);
  const auto ax_i = quadrature::make_axis(li, prod.env.gauss_im, prod.env.osc_im, density_scale);

  const int nr = static_cast<int>(ax_r.x.size());
  std::vector<double> row(nr, 0.0);
  quadrature::parallel_for(nr, threads, [&](int i) {
    kahan_sum s;
    for (size_t j = 0; j < ax_i.x.size(); ++j)
      s.add(ax_i.w[j] * prod.eval({ax_r.x[i], ax_i.x[j]}).real());
    row[i] = s.value();
  });
  kahan_sum total;
  for (int i = 0; i < nr; ++i) total.add(ax_r.w[i] * row[i]);
  return std::max(0.0, total.value() / pi);
}

}  // namespace catmech
