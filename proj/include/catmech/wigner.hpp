#pragma once

#include <algorithm>
#include <vector>

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/quadrature.hpp"

namespace catmech {

/// Rectangular phase-space sampling window. Sample counts must be odd (the
/// grid integrals use composite Simpson rules).
struct GridSpec {
  double re_min = -6.0, re_max = 6.0;
  double im_min = -6.0, im_max = 6.0;
  int n_re = 301, n_im = 301;

  void validate() const {
    if (!(re_max > re_min) || !(im_max > im_min)) throw config_error("empty phase-space window");
    if (n_re < 3 || n_im < 3 || n_re % 2 == 0 || n_im % 2 == 0)
      throw config_error("grid sample counts must be odd and >= 3");
  }
  double dre() const { return (re_max - re_min) / (n_re - 1); }
  double dim() const { return (im_max - im_min) / (n_im - 1); }
};

/// Sampled Wigner function W(beta) plus the quadrature metadata that
/// produced it.
struct WignerGrid {
  GridSpec spec;
  std::vector<double> values;  // row-major: values[i_re * n_im + j_im]
  double lambda_cutoff_re = 0.0, lambda_cutoff_im = 0.0;
  int lambda_nodes_re = 0, lambda_nodes_im = 0;

  double at(int i, int j) const { return values[static_cast<size_t>(i) * spec.n_im + j]; }

  double beta_re(int i) const { return spec.re_min + i * spec.dre(); }
  double beta_im(int j) const { return spec.im_min + j * spec.dim(); }

  double integral() const { return simpson2d(false); }
  double abs_integral() const { return simpson2d(true); }

  double boundary_max_abs() const {
    double m = 0.0;
    for (int i = 0; i < spec.n_re; ++i) {
      m = std::max(m, std::abs(at(i, 0)));
      m = std::max(m, std::abs(at(i, spec.n_im - 1)));
    }
    for (int j = 0; j < spec.n_im; ++j) {
      m = std::max(m, std::abs(at(0, j)));
      m = std::max(m, std::abs(at(spec.n_re - 1, j)));
    }
    return m;
  }

 private:
  double simpson2d(bool absolute) const {
    auto coeff = [](int i, int n) -> double {
      if (i == 0 || i == n - 1) return 1.0;
      return (i % 2 == 1) ? 4.0 : 2.0;
    };
    kahan_sum total;
    for (int i = 0; i < spec.n_re; ++i) {
      const double ci = coeff(i, spec.n_re);
      kahan_sum row;
      for (int j = 0; j < spec.n_im; ++j) {
        const double v = at(i, j);
        row.add(coeff(j, spec.n_im) * (absolute ? std::abs(v) : v));
      }
      total.add(ci * row.value());
    }
    return total.value() * spec.dre() * spec.dim() / 9.0;
  }
};

/**
 * Fourier transform of a characteristic function to the Wigner function,
 *
 *   W(beta) = (1/pi^2) integral chi(lambda) e^{beta lambda* - beta* lambda}
 *             d^2 lambda,
 *
 * evaluated by separating the plane-wave kernel: an inner pass over lambda_i
 * for every beta_r, then an outer pass over lambda_r for every beta_i. The
 * lambda window is set where the envelope falls below eps; the result is
 * checked to be real to 1e-8 relative and the residue discarded.
 */
inline WignerGrid wigner_from_chi(const ChiFunction& chi, const GridSpec& spec, int threads = 1,
                                  double eps = 1e-12, double density_scale = 1.0) {
  spec.validate();
  if (!(chi.env.gauss_re > 0.0) || !(chi.env.gauss_im > 0.0))
    throw std::domain_error("wigner_from_chi: characteristic function must decay");

  double lr, li;
  verified_cutoffs(chi, eps, lr, li);
  const double beta_re_max = std::max(std::abs(spec.re_min), std::abs(spec.re_max));
  const double beta_im_max = std::max(std::abs(spec.im_min), std::abs(spec.im_max));
  // kernel e^{2i(beta_i lr - beta_r li)}: lambda_r axis oscillates with beta_i
  const auto ax_r = quadrature::make_axis(lr, chi.env.gauss_re,
                                          chi.env.osc_re + 2.0 * beta_im_max, density_scale);
  const auto ax_i = quadrature::make_axis(li, chi.env.gauss_im,
                                          chi.env.osc_im + 2.0 * beta_re_max, density_scale);
  const int nr = static_cast<int>(ax_r.x.size());
  const int ni = static_cast<int>(ax_i.x.size());

  WignerGrid grid;
  grid.spec = spec;
  grid.lambda_cutoff_re = lr;
  grid.lambda_cutoff_im = li;
  grid.lambda_nodes_re = nr;
  grid.lambda_nodes_im = ni;
  grid.values.assign(static_cast<size_t>(spec.n_re) * spec.n_im, 0.0);

  // inner pass: g[i_lr][i_br] = sum_j w_j chi(lr_i, li_j) e^{-2 i br li_j}
  std::vector<complexd> inner(static_cast<size_t>(nr) * spec.n_re);
  quadrature::parallel_for(nr, threads, [&](int i) {
    std::vector<complexd> chi_row(ni);
    for (int j = 0; j < ni; ++j) chi_row[j] = ax_i.w[j] * chi({ax_r.x[i], ax_i.x[j]});
    for (int ib = 0; ib < spec.n_re; ++ib) {
      const double br = spec.re_min + ib * spec.dre();
      complexd acc = 0.0;
      for (int j = 0; j < ni; ++j) {
        const double phase = -2.0 * br * ax_i.x[j];
        acc += chi_row[j] * complexd(std::cos(phase), std::sin(phase));
      }
      inner[static_cast<size_t>(i) * spec.n_re + ib] = acc;
    }
  });

  // outer pass: W(br, bi) = (1/pi^2) Re sum_i w_i g[i][br] e^{+2 i bi lr_i}
  double max_im = 0.0, max_re = 0.0;
  std::vector<double> row_max_im(spec.n_im, 0.0), row_max_re(spec.n_im, 0.0);
  quadrature::parallel_for(spec.n_im, threads, [&](int jb) {
    const double bi = spec.im_min + jb * spec.dim();
    for (int ib = 0; ib < spec.n_re; ++ib) {
      complexd acc = 0.0;
      for (int i = 0; i < nr; ++i) {
        const double phase = 2.0 * bi * ax_r.x[i];
        acc += ax_r.w[i] * inner[static_cast<size_t>(i) * spec.n_re + ib] *
               complexd(std::cos(phase), std::sin(phase));
      }
      acc /= pi * pi;
      grid.values[static_cast<size_t>(ib) * spec.n_im + jb] = acc.real();
      row_max_im[jb] = std::max(row_max_im[jb], std::abs(acc.imag()));
      row_max_re[jb] = std::max(row_max_re[jb], std::abs(acc.real()));
    }
  });
  for (int jb = 0; jb < spec.n_im; ++jb) {
    max_im = std::max(max_im, row_max_im[jb]);
    max_re = std::max(max_re, row_max_re[jb]);
  }
  if (max_im > 1e-8 * std::max(max_re, 1e-30))
    throw convergence_error("Wigner transform produced a non-negligible imaginary residue");
  return grid;
}

/// Wigner negativity N = integral |W| - 1. Requires the grid to capture the
/// state (integral of W within 1e-3 of one); otherwise the window or cutoff
/// must be enlarged.
inline double negativity(const WignerGrid& grid) {
  const double total = grid.integral();
  if (std::abs(total - 1.0) > 1e-3)
    throw convergence_error(
        "Wigner grid integral deviates from 1 by more than 1e-3; enlarge the grid or cutoff");
  return grid.abs_integral() - 1.0;
}

/// Square grid centred on the origin that is automatically expanded (keeping
/// the sample density) until |W| < boundary_eps on the window's edge.
inline WignerGrid wigner_auto(const ChiFunction& chi, int threads = 1, double half_width = 6.0,
                              int n_points = 301, double boundary_eps = 1e-10,
                              double eps = 1e-12, double density_scale = 1.0,
                              double max_half_width = 14.0) {
  double h = half_width;
  int n = n_points | 1;
  const double density = (n - 1) / (2.0 * half_width);
  for (;;) {
    GridSpec spec{-h, h, -h, h, n, n};
    WignerGrid g = wigner_from_chi(chi, spec, threads, eps, density_scale);
    if (g.boundary_max_abs() < boundary_eps || h >= max_half_width) return g;
    h += 1.0;
    n = static_cast<int>(std::round(2.0 * h * density)) | 1;
  }
}

}  // namespace catmech
