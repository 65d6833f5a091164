#pragma once

#include <array>
#include <functional>

#include "catmech/common.hpp"

namespace catmech {

struct OptimizeResult {
  double t_star = 0.0;   ///< maximizing transmissivity (intensity)
  double rc_star = 0.0;  ///< maximizing cavity squeezing degree
  double f_star = 0.0;
  int evaluations = 0;
};

struct OptimizeDomain {
  double t_lo = 0.05, t_hi = 0.99, t_step = 0.01;
  double rc_lo = 0.0, rc_hi = 1.5, rc_step = 0.05;
  bool rc_enabled = false;
  double refine_tol = 1e-4;
};

namespace detail {

/// Deterministic Nelder-Mead maximization on a clamped box; the standard
/// reflect/expand/contract/shrink moves, terminating when the simplex spans
/// less than tol in every coordinate.
template <typename F>
inline void nelder_mead_2d(F&& f, double lo0, double hi0, double lo1, double hi1, double step0,
                           double step1, double tol, std::array<double, 2>& x, double& fx,
                           int& evals) {
  auto clamp = [&](std::array<double, 2> p) {
    p[0] = std::min(hi0, std::max(lo0, p[0]));
    p[1] = std::min(hi1, std::max(lo1, p[1]));
    return p;
  };
  std::array<std::array<double, 2>, 3> pts = {
      clamp(x), clamp({x[0] + step0, x[1]}), clamp({x[0], x[1] + step1})};
  std::array<double, 3> vals;
  for (int i = 0; i < 3; ++i) {
    vals[i] = f(pts[i][0], pts[i][1]);
    ++evals;
  }
  for (int iter = 0; iter < 400; ++iter) {
    // order: best, middle, worst
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    const auto &best = pts[idx[0]], &worst = pts[idx[2]];
    const double span0 = std::max({pts[0][0], pts[1][0], pts[2][0]}) -
                         std::min({pts[0][0], pts[1][0], pts[2][0]});
    const double span1 = std::max({pts[0][1], pts[1][1], pts[2][1]}) -
                         std::min({pts[0][1], pts[1][1], pts[2][1]});
    if (span0 < tol && span1 < tol) break;
    const std::array<double, 2> centroid = {(pts[idx[0]][0] + pts[idx[1]][0]) / 2.0,
                                            (pts[idx[0]][1] + pts[idx[1]][1]) / 2.0};
    auto probe = [&](double coeff) {
      return clamp({centroid[0] + coeff * (centroid[0] - worst[0]),
                    centroid[1] + coeff * (centroid[1] - worst[1])});
    };
    const auto refl = probe(1.0);
    const double f_refl = f(refl[0], refl[1]);
    ++evals;
    if (f_refl > vals[idx[0]]) {
      const auto expa = probe(2.0);
      const double f_expa = f(expa[0], expa[1]);
      ++evals;
      if (f_expa > f_refl) {
        pts[idx[2]] = expa;
        vals[idx[2]] = f_expa;
      } else {
        pts[idx[2]] = refl;
        vals[idx[2]] = f_refl;
      }
    } else if (f_refl > vals[idx[1]]) {
      pts[idx[2]] = refl;
      vals[idx[2]] = f_refl;
    } else {
      const auto contr = probe(-0.5);
      const double f_contr = f(contr[0], contr[1]);
      ++evals;
      if (f_contr > vals[idx[2]]) {
        pts[idx[2]] = contr;
        vals[idx[2]] = f_contr;
      } else {
        for (int i : {idx[1], idx[2]}) {
          pts[i] = clamp({(pts[i][0] + best[0]) / 2.0, (pts[i][1] + best[1]) / 2.0});
          vals[i] = f(pts[i][0], pts[i][1]);
          ++evals;
        }
      }
    }
  }
  int ib = 0;
  for (int i = 1; i < 3; ++i)
    if (vals[i] > vals[ib]) ib = i;
  if (vals[ib] > fx) {
    x = pts[ib];
    fx = vals[ib];
  }
}

}  // namespace detail

/**
 * Maximizes f(T, r_c) over the bounded domain: a coarse deterministic grid
 * scan followed by Nelder-Mead refinement to refine_tol in both parameters.
 * The returned value never regresses below the best coarse-grid point.
 */
inline OptimizeResult maximize_fidelity(const std::function<double(double, double)>& f,
                                        const OptimizeDomain& dom = {}) {
  OptimizeResult out;
  if (dom.t_hi < dom.t_lo || (dom.rc_enabled && dom.rc_hi < dom.rc_lo))
    throw config_error("empty optimization domain");

  double best_t = dom.t_lo, best_rc = dom.rc_lo;
  double best_f = -1.0;
  for (double t = dom.t_lo; t <= dom.t_hi + 1e-12; t += dom.t_step) {
    const double tc = std::min(t, dom.t_hi);
    if (dom.rc_enabled) {
      for (double rc = dom.rc_lo; rc <= dom.rc_hi + 1e-12; rc += dom.rc_step) {
        const double rcc = std::min(rc, dom.rc_hi);
        const double v = f(tc, rcc);
        ++out.evaluations;
        if (v > best_f) {
          best_f = v;
          best_t = tc;
          best_rc = rcc;
        }
      }
    } else {
      const double v = f(tc, dom.rc_lo);
      ++out.evaluations;
      if (v > best_f) {
        best_f = v;
        best_t = tc;
        best_rc = dom.rc_lo;
      }
    }
    if (tc >= dom.t_hi) break;
  }

  std::array<double, 2> x = {best_t, best_rc};
  double fx = best_f;
  if (dom.rc_enabled) {
    detail::nelder_mead_2d(f, dom.t_lo, dom.t_hi, dom.rc_lo, dom.rc_hi, dom.t_step / 2.0,
                           dom.rc_step / 2.0, dom.refine_tol, x, fx, out.evaluations);
  } else if (dom.t_hi > dom.t_lo) {
    // golden-section bracket around the best coarse point
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(dom.t_lo, best_t - dom.t_step);
    double hi = std::min(dom.t_hi, best_t + dom.t_step);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c, dom.rc_lo), fd = f(d, dom.rc_lo);
    out.evaluations += 2;
    while (hi - lo > dom.refine_tol) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = f(c, dom.rc_lo);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = f(d, dom.rc_lo);
      }
      ++out.evaluations;
    }
    const double mid = (lo + hi) / 2.0;
    const double fmid = f(mid, dom.rc_lo);
    ++out.evaluations;
    if (fmid > fx) {
      x = {mid, dom.rc_lo};
      fx = fmid;
    }
  }

  out.t_star = x[0];
  out.rc_star = x[1];
  out.f_star = fx;
  return out;
}

}  // namespace catmech
