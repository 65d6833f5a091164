#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/gaussian.hpp"
#include "catmech/quadrature.hpp"
#include "catmech/wigner.hpp"

namespace catmech {

/**
 * Truncated Fock-space density matrix: the brute-force referee for the
 * closed-form pipeline. Not a performance path.
 */
struct FockDensityMatrix {
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }

  /// Hermiticity, unit trace, positivity, and a truncation-tail check
  /// (top 10% of levels must hold < 1e-8 population).
  void validate(double tail_tol = 1e-8) const {
    if (rho.rows() != rho.cols() || rho.rows() < 2) throw dimension_error("bad density matrix shape");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw dimension_error("density matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-12)
      throw dimension_error("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw dimension_error("density matrix has a negative eigenvalue");
    check_tail(tail_tol);
  }

  void check_tail(double tail_tol = 1e-8) const {
    const int d = dim();
    const int tail_start = d - std::max(1, d / 10);
    double tail = 0.0;
    for (int k = tail_start; k < d; ++k) tail += rho(k, k).real();
    if (tail > tail_tol)
      throw dimension_error("truncation tail carries too much population; increase the dimension");
  }
};

namespace fock {

inline Eigen::MatrixXd annihilation(int dim) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  return b;
}

/// Normalized |alpha> in the truncated basis.
inline Eigen::VectorXcd coherent_vector(double alpha, int dim) {
  Eigen::VectorXcd v(dim);
  double log_amp = -alpha * alpha / 2.0;
  v(0) = std::exp(log_amp);
  for (int k = 1; k < dim; ++k)
    v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  return v;
}

/// Normalized (|alpha> +/- |-alpha>) in the truncated basis.
inline Eigen::VectorXcd cat_vector(const CatState& cat, int dim) {
  cat.validate();
  Eigen::VectorXcd v = coherent_vector(cat.alpha, dim);
  const double s = (cat.parity == CatParity::even) ? 1.0 : -1.0;
  for (int k = 0; k < dim; ++k)
    if ((k % 2 == 0) != (s > 0)) v(k) = 0.0;       // drop the cancelled parity sector
  v *= 2.0;
  v.normalize();
  return v;
}

/// Generalized Laguerre stack L_n^{(d)}(x) for n = 0..count-1.
inline void laguerre_column(int d, double x, int count, double* out) {
  if (count <= 0) return;
  out[0] = 1.0;
  if (count == 1) return;
  out[1] = 1.0 + d - x;
  for (int n = 1; n + 1 < count; ++n)
    out[n + 1] = ((2.0 * n + d + 1.0 - x) * out[n] - (n + d) * out[n - 1]) / (n + 1.0);
}

}  // namespace fock

/// Squeezed thermal state built by applying the exponential of the quadratic
/// squeeze generator to the thermal diagonal. Squeezing angle pi matches the
/// (A, B) = ((2 nbar + 1) e^{-2r}, (2 nbar + 1) e^{+2r}) moment convention.
inline FockDensityMatrix build_squeezed_thermal(const SqueezedThermalSpec& spec, int dim,
                                                bool auto_expand = true) {
  spec.validate();
  const bool at_pi = std::abs(spec.phi - pi) < 1e-12;
  if (!at_pi && std::abs(spec.phi) > 1e-12)
    throw config_error("build_squeezed_thermal: only squeezing angles 0 and pi are supported");
  for (;;) {
    const Eigen::MatrixXd b = fock::annihilation(dim);
    const Eigen::MatrixXd bsq = b * b;
    const double sign = at_pi ? 1.0 : -1.0;
    const Eigen::MatrixXd gen = 0.5 * spec.r * sign * (bsq.transpose() - bsq);
    const Eigen::MatrixXd s = gen.exp();

    Eigen::VectorXd thermal(dim);
    if (spec.nbar == 0.0) {
      thermal.setZero();
      thermal(0) = 1.0;
    } else {
      const double q = spec.nbar / (1.0 + spec.nbar);
      double p = 1.0 / (1.0 + spec.nbar);
      for (int k = 0; k < dim; ++k, p *= q) thermal(k) = p;
      thermal /= thermal.sum();  // renormalize the truncated geometric series
    }
    FockDensityMatrix out;
    out.rho = (s * thermal.asDiagonal() * s.transpose()).cast<complexd>();
    out.rho /= out.rho.trace();
    try {
      out.check_tail();
    } catch (const dimension_error&) {
      if (auto_expand && dim < 240) {
        dim *= 2;
        continue;
      }
      throw;
    }
    return out;
  }
}

namespace fock {

/// Per-total-excitation rotation blocks of the passive (real-mixing) beam
/// splitter with cos(theta) equal to the amplitude transmissivity.
inline std::vector<Eigen::MatrixXd> beam_splitter_blocks(double theta, int dim_m, int dim_c) {
  std::vector<Eigen::MatrixXd> blocks;
  const int n_total = dim_m + dim_c - 1;
  blocks.reserve(n_total);
  for (int total = 0; total < n_total; ++total) {
    const int k_lo = std::max(0, total - dim_c + 1);
    const int k_hi = std::min(total, dim_m - 1);
    const int sz = k_hi - k_lo + 1;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(sz, sz);
    for (int i = 0; i + 1 < sz; ++i) {
      const int k = k_lo + i;           // mechanical excitation
      const int c = total - k;          // cavity excitation
      const double amp = std::sqrt(static_cast<double>(k + 1) * c);
      gen(i + 1, i) = amp;              // phonon up, photon down
      gen(i, i + 1) = -amp;
    }
    blocks.push_back((theta * gen).exp());
  }
  return blocks;
}

}  // namespace fock

struct HeraldedFockState {
  FockDensityMatrix state;  ///< normalized conditional mechanical state
  double probability = 0.0;
};

/**
 * Mixes the mechanical and cavity states on the effective beam splitter
 * (amplitude transmissivity t) and projects the detected arm onto |n>.
 * Mixed inputs are decomposed into eigenstate pairs; each pure pair is
 * rotated block-by-block over total excitation number.
 */
inline HeraldedFockState beam_splitter_project(const FockDensityMatrix& rho_m,
                                               const FockDensityMatrix& rho_c,
                                               double t_amplitude, int n,
                                               double min_probability = 1e-15) {
  if (n < 0) throw config_error("photon count must be a non-negative integer");
  if (!(t_amplitude > 0.0) || t_amplitude > 1.0)
    throw config_error("transmissivity amplitude must be in (0, 1]");
  const int dm = rho_m.dim(), dc = rho_c.dim();
  if (n >= dc) throw dimension_error("detected count beyond the cavity truncation");

  const double theta = std::acos(t_amplitude);
  const auto blocks = fock::beam_splitter_blocks(theta, dm, dc);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(rho_m.rho), ec(rho_c.rho);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dm, dm);
  double prob = 0.0;

  Eigen::VectorXcd cond(dm);
  for (int i = dm - 1; i >= 0; --i) {
    const double p = em.eigenvalues()(i);
    if (p < 1e-14) continue;
    const Eigen::VectorXcd u = em.eigenvectors().col(i);
    for (int j = dc - 1; j >= 0; --j) {
      const double q = ec.eigenvalues()(j);
      const double weight = p * q;
      if (weight < 1e-16) continue;
      const Eigen::VectorXcd w = ec.eigenvectors().col(j);
      cond.setZero();
      // component of U (u (x) w) with exactly n photons in the detected arm
      for (int total = n; total < dm + dc - 1; ++total) {
        const int k_lo = std::max(0, total - dc + 1);
        const int k_hi = std::min(total, dm - 1);
        const int k_out = total - n;
        if (k_out < k_lo || k_out > k_hi) continue;
        const auto& blk = blocks[total];
        complexd amp = 0.0;
        for (int k = k_lo; k <= k_hi; ++k)
          amp += blk(k_out - k_lo, k - k_lo) * u(k) * w(total - k);
        cond(k_out) += amp;
      }
      const double norm2 = cond.squaredNorm();
      prob += weight * norm2;
      if (norm2 > 0.0) acc.noalias() += weight * (cond * cond.adjoint());
    }
  }

  if (prob < min_probability) throw herald_error("herald outcome has negligible probability");
  HeraldedFockState out;
  out.probability = prob;
  out.state.rho = acc / prob;
  return out;
}

/// Herald probability without conditioning (no minimum-probability gate).
inline double herald_probability_fock(const FockDensityMatrix& rho_m,
                                      const FockDensityMatrix& rho_c, double t_amplitude, int n) {
  try {
    return beam_splitter_project(rho_m, rho_c, t_amplitude, n, 0.0).probability;
  } catch (const herald_error&) {
    return 0.0;
  }
}

/// chi(lambda) = Tr[rho D(lambda)] from the closed-form displacement matrix
/// elements (associated Laguerre polynomials).
inline complexd chi_of_rho(const FockDensityMatrix& rho, complexd lambda) {
  const int dim = rho.dim();
  const double x = std::norm(lambda);
  const double gauss = std::exp(-x / 2.0);
  std::vector<double> lag(dim);
  kahan_sum re_acc, im_acc;

  complexd pow_lam = 1.0;
  for (int d = 0; d < dim; ++d) {
    fock::laguerre_column(d, x, dim - d, lag.data());
    if (d > 0) pow_lam *= lambda;
    // c_{n,d} = sqrt(n!/(n+d)!); build it per n by recurrence
    double c = 1.0;
    for (int j = 1; j <= d; ++j) c /= std::sqrt(static_cast<double>(j));
    for (int n = 0; n + d < dim; ++n) {
      if (n > 0) c *= std::sqrt(static_cast<double>(n) / (n + d));
      // D_{m n} with m = n + d: sqrt(n!/m!) lambda^d e^{-x/2} L_n^{(d)}(x)
      const complexd dmn = c * pow_lam * gauss * lag[n];
      if (d == 0) {
        const complexd term = rho.rho(n, n) * dmn;
        re_acc.add(term.real());
        im_acc.add(term.imag());
      } else {
        // rho_{n m} D_{m n} + rho_{m n} D_{n m}, with D_{n m} = conj(D_{m n})|_{lambda -> -lambda}
        const complexd dnm = std::conj(dmn) * ((d % 2 == 0) ? 1.0 : -1.0);
        const complexd term = rho.rho(n, n + d) * dmn + rho.rho(n + d, n) * dnm;
        re_acc.add(term.real());
        im_acc.add(term.imag());
      }
    }
  }
  return {re_acc.value(), im_acc.value()};
}

/// Pointwise Wigner function of rho via the Laguerre series.
inline double wigner_of_rho(const FockDensityMatrix& rho, complexd beta) {
  const int dim = rho.dim();
  const double x = 4.0 * std::norm(beta);
  const double env = (2.0 / pi) * std::exp(-x / 2.0);
  std::vector<double> lag(dim);
  kahan_sum acc;
  complexd pow_b = 1.0;
  const complexd two_bconj = 2.0 * std::conj(beta);
  for (int d = 0; d < dim; ++d) {
    fock::laguerre_column(d, x, dim - d, lag.data());
    if (d > 0) pow_b *= two_bconj;
    double c = 1.0;
    for (int j = 1; j <= d; ++j) c /= std::sqrt(static_cast<double>(j));
    for (int n = 0; n + d < dim; ++n) {
      if (n > 0) c *= std::sqrt(static_cast<double>(n) / (n + d));
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      if (d == 0) {
        acc.add(rho.rho(n, n).real() * parity * lag[n]);
      } else {
        const complexd term = rho.rho(n + d, n) * parity * c * pow_b * lag[n];
        acc.add(2.0 * term.real());
      }
    }
  }
  return env * acc.value();
}

/// Wigner function of rho sampled on a grid (same conventions as
/// wigner_from_chi, so the two routes are directly comparable).
inline WignerGrid wigner_grid_of_rho(const FockDensityMatrix& rho, const GridSpec& spec,
                                     int threads = 1) {
  spec.validate();
  WignerGrid g;
  g.spec = spec;
  g.values.assign(static_cast<size_t>(spec.n_re) * spec.n_im, 0.0);
  quadrature::parallel_for(spec.n_re, threads, [&](int i) {
    const double br = spec.re_min + i * spec.dre();
    for (int j = 0; j < spec.n_im; ++j) {
      const double bi = spec.im_min + j * spec.dim();
      g.values[static_cast<size_t>(i) * spec.n_im + j] = wigner_of_rho(rho, {br, bi});
    }
  });
  return g;
}

/// <psi_cat| rho |psi_cat>.
inline double fidelity_fock(const FockDensityMatrix& rho, const CatState& cat) {
  const Eigen::VectorXcd v = fock::cat_vector(cat, rho.dim());
  return std::real(v.dot(rho.rho * v));
}

/**
 * Thermal damping channel integrated step by step (classic RK4 on the
 * generator gamma (nbar+1) D[b] + gamma nbar D[b^dag]). The step count is
 * chosen so that halving it moves the result below 1e-8.
 */
inline FockDensityMatrix damp_rho(const FockDensityMatrix& rho, double gamma_m, double nbar,
                                  double t, int steps_override = 0) {
  if (gamma_m < 0 || nbar < 0 || t < 0) throw config_error("damping parameters must be >= 0");
  if (gamma_m * t == 0.0) return rho;
  const int dim = rho.dim();
  const Eigen::MatrixXcd b = fock::annihilation(dim).cast<complexd>();
  const Eigen::MatrixXcd bdag = b.adjoint();
  const Eigen::MatrixXcd num_op = bdag * b;
  const Eigen::MatrixXcd num_op_rev = b * bdag;

  const auto lindblad = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = gamma_m * (nbar + 1.0) *
                           (b * r * bdag - 0.5 * (num_op * r + r * num_op));
    out += gamma_m * nbar * (bdag * r * b - 0.5 * (num_op_rev * r + r * num_op_rev));
    return out;
  };

  const double scale = gamma_m * (2.0 * nbar + 1.0) * dim * t;
  const int steps = steps_override > 0
                        ? steps_override
                        : std::max(64, static_cast<int>(std::ceil(8.0 * scale)));
  const double dt = t / steps;
  Eigen::MatrixXcd r = rho.rho;
  for (int s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd k1 = lindblad(r);
    const Eigen::MatrixXcd k2 = lindblad(r + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = lindblad(r + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = lindblad(r + dt * k3);
    r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  FockDensityMatrix out;
  out.rho = (r + r.adjoint()) / 2.0;
  out.rho /= out.rho.trace();
  return out;
}

/// Unconditional swap of the mechanical state toward the output port with
/// amplitude transfer sqrt(1 - leak^2): beam splitter against vacuum, other
/// port traced out. Referee for the closed-form readout map.
inline FockDensityMatrix readout_channel_fock(const FockDensityMatrix& rho_m, double leak) {
  if (leak < 0.0 || leak > 1.0) throw config_error("leak must be in [0, 1]");
  const int dm = rho_m.dim();
  // output = transfer * b_m + leak * vac; equivalently a beam splitter with
  // cos(theta) = transfer acting on (mech, vac), keeping the rotated mode.
  const double transfer = std::sqrt(std::max(0.0, 1.0 - leak * leak));
  const double theta = std::acos(std::min(1.0, transfer));
  const auto blocks = fock::beam_splitter_blocks(theta, dm, dm);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(rho_m.rho);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dm, dm);
  for (int i = dm - 1; i >= 0; --i) {
    const double p = em.eigenvalues()(i);
    if (p < 1e-14) continue;
    const Eigen::VectorXcd u = em.eigenvectors().col(i);
    // |psi> (x) |0>: total excitation = mechanical excitation
    Eigen::MatrixXcd joint = Eigen::MatrixXcd::Zero(dm, dm);  // [kept mode, traced mode]
    for (int total = 0; total < dm; ++total) {
      const auto& blk = blocks[total];
      const int k_lo = std::max(0, total - dm + 1);
      for (int k_out = k_lo; k_out <= std::min(total, dm - 1); ++k_out) {
        // input amplitude only at k = total (cavity/vac index 0)
        joint(k_out, total - k_out) += blk(k_out - k_lo, total - k_lo) * u(total);
      }
    }
    acc.noalias() += p * (joint * joint.adjoint());  // trace over the second index
  }
  FockDensityMatrix out;
  out.rho = acc / acc.trace();
  return out;
}

}  // namespace catmech
