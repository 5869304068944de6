#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace hoexp {

/// Harmonic oscillator H0 = p^2/2m + k x^2/2.
///
/// Only (m, k, hbar) are stored; the frequency and the width parameter are
/// derived on demand.
class OscillatorModel {
 public:
  /// Throws std::invalid_argument unless all three constants are finite and positive.
  OscillatorModel(double mass, double spring, double hbar);

  /// m = k = hbar = 1.
  static OscillatorModel unit() { return {1.0, 1.0, 1.0}; }

  [[nodiscard]] double mass() const noexcept { return mass_; }
  [[nodiscard]] double spring() const noexcept { return spring_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }

  /// omega = sqrt(k/m)
  [[nodiscard]] double omega() const noexcept;
  /// alpha = (m k / hbar^2)^(1/4)
  [[nodiscard]] double alpha() const noexcept;
  /// E_n = (n + 1/2) hbar omega
  [[nodiscard]] double eigenenergy(std::size_t n) const noexcept;

  [[nodiscard]] OscillatorModel with_spring(double spring) const { return {mass_, spring, hbar_}; }

  friend bool operator==(const OscillatorModel&, const OscillatorModel&) = default;

 private:
  double mass_;
  double spring_;
  double hbar_;
};

/// Uniform quadrature grid x_i = -L + i*dx, dx = 2L/M, i = 0..M-1.
struct GridSpec {
  double half_width = 16.0;
  std::size_t points = 4096;

  [[nodiscard]] double spacing() const noexcept { return 2.0 * half_width / static_cast<double>(points); }
  [[nodiscard]] double x(std::size_t i) const noexcept {
    return -half_width + static_cast<double>(i) * spacing();
  }
};

/// Grid wide enough for Hermite functions up to n_max of the narrowest of the
/// given widths: L = max(12, 3 sqrt(2 n_max + 1) / alpha), at least 4096 points
/// and at least eight points per shortest local wavelength.
GridSpec default_quadrature_grid(std::size_t n_max, double alpha_min);

/// Physicists' Hermite polynomial by forward recurrence. Throws RangeError on overflow.
double hermite_eval(std::size_t n, double xi);

/// ln N_n with N_n = [alpha / (sqrt(pi) 2^n n!)]^(1/2).
double log_normalization_constant(const OscillatorModel& model, std::size_t n);
double normalization_constant(const OscillatorModel& model, std::size_t n);

/// psi_n(x) = N_n H_n(alpha x) exp(-alpha^2 x^2 / 2), evaluated by the
/// normalized three-term recurrence with exponent tracking.
double eigenfunction_eval(const OscillatorModel& model, std::size_t n, double x);

/// Writes psi_0(x) .. psi_{out.size()-1}(x).
void eigenfunction_table(const OscillatorModel& model, double x, std::span<double> out);

/// Same recurrence without the Gaussian factor: N_n H_n(alpha x) for n = 0..out.size()-1.
/// Values are returned as (mantissa, log scale) pairs so that large orders do not overflow.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
  [[nodiscard]] double value() const;
};
void normalized_hermite_table(double alpha, double x, std::span<ScaledValue> out);

/// <row| x^2/2 |col> from the ladder algebra; zero unless |row - col| is 0 or 2.
double x2_half_matrix_element(const OscillatorModel& model, std::size_t row, std::size_t col);

/// Integral of psi^a_{n_a} psi^b_{n_b} by the trapezoid rule on `grid`.
/// Throws GridTooSmallError if the integrand at either end exceeds 1e-12 of its peak.
double overlap_quadrature(const OscillatorModel& model_a, std::size_t n_a, const OscillatorModel& model_b,
                          std::size_t n_b, const GridSpec& grid);
double overlap_quadrature(const OscillatorModel& model_a, std::size_t n_a, const OscillatorModel& model_b,
                          std::size_t n_b);

/// Columns are psi_0 .. psi_{n_max} sampled on `grid`.
Eigen::MatrixXd sample_basis(const OscillatorModel& model, std::size_t n_max, const GridSpec& grid);

/// Matrix of overlaps <psi^a_i | psi^b_j>, i <= n_max_a, j <= n_max_b.
Eigen::MatrixXd overlap_matrix(const OscillatorModel& model_a, std::size_t n_max_a, const OscillatorModel& model_b,
                               std::size_t n_max_b, const GridSpec& grid);

}  // namespace hoexp
