#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace catmech {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// CODATA 2018 (exact by SI definition)
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double c_light = 299792458.0;       // m / s

using complexd = std::complex<double>;

/// Bad or inconsistent user input (parameters, schedules, config files).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Drift matrix not Hurwitz / parametric gain exceeds the beam-splitter rate.
class instability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quadrature or grid failed its resolution / normalization check.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditioning on an outcome of (numerically) zero probability.
class herald_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock-space truncation too small for the requested state.
class dimension_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier compensated accumulator.
class kahan_sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sq(double x) { return x * x; }

}  // namespace catmech
