#include "hoexp/oscillator_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoexp/errors.hpp"

namespace hoexp {

namespace {

constexpr double kRescaleThreshold = 0x1p+500;
constexpr double kRescaleFactor = 0x1p-500;
const double kLogRescale = 500.0 * std::numbers::ln2;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Runs the normalized recurrence
//   a_{k+1} = sqrt(2/(k+1)) xi a_k - sqrt(k/(k+1)) a_{k-1}
// starting from a_0 = exp(log_a0), writing mantissa/scale pairs.
void normalized_sweep(double xi, double log_a0, std::span<ScaledValue> out) {
  if (out.empty()) return;
  double scale = log_a0;
  double prev = 0.0;
  double cur = 1.0;
  out[0] = {cur, scale};
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double next = std::sqrt(2.0 / (kd + 1.0)) * xi * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleThreshold) {
      cur *= kRescaleFactor;
      prev *= kRescaleFactor;
      scale += kLogRescale;
    }
    if (!std::isfinite(cur)) {
      throw RangeError("normalized Hermite recurrence overflowed at order " + std::to_string(k + 1));
    }
    out[k + 1] = {cur, scale};
  }
}

}  // namespace

OscillatorModel::OscillatorModel(double mass, double spring, double hbar)
    : mass_(mass), spring_(spring), hbar_(hbar) {
  if (!positive_finite(mass) || !positive_finite(spring) || !positive_finite(hbar)) {
    throw std::invalid_argument("oscillator constants m, k, hbar must be finite and positive");
  }
}

double OscillatorModel::omega() const noexcept { return std::sqrt(spring_ / mass_); }

double OscillatorModel::alpha() const noexcept { return std::sqrt(std::sqrt(mass_ * spring_) / hbar_); }

double OscillatorModel::eigenenergy(std::size_t n) const noexcept {
  return (static_cast<double>(n) + 0.5) * hbar_ * omega();
}

GridSpec default_quadrature_grid(std::size_t n_max, double alpha_min) {
  const double reach = std::sqrt(2.0 * static_cast<double>(n_max) + 1.0);
  GridSpec grid;
  grid.half_width = std::max(12.0, 3.0 * reach / alpha_min);
  // Largest local wavenumber of psi_n is about alpha*sqrt(2n+1); since the
  // support scales as 1/alpha the point count depends only on n_max.
  const double k_max = std::max(1.0, reach * alpha_min);
  const double dx = std::numbers::pi / (4.0 * k_max);
  const auto needed = static_cast<std::size_t>(std::ceil(2.0 * grid.half_width / dx));
  grid.points = std::max<std::size_t>(4096, needed + (needed % 2));
  return grid;
}

double hermite_eval(std::size_t n, double xi) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * xi;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = 2.0 * xi * cur - 2.0 * static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
    if (!std::isfinite(cur)) {
      throw RangeError("H_" + std::to_string(n) + "(" + std::to_string(xi) + ") overflows at order " +
                       std::to_string(k + 1));
    }
  }
  return cur;
}

double log_normalization_constant(const OscillatorModel& model, std::size_t n) {
  const double nd = static_cast<double>(n);
  return 0.5 * (std::log(model.alpha()) - 0.5 * std::log(std::numbers::pi) - nd * std::numbers::ln2 -
                std::lgamma(nd + 1.0));
}

double normalization_constant(const OscillatorModel& model, std::size_t n) {
  return std::exp(log_normalization_constant(model, n));
}

double ScaledValue::value() const {
  if (mantissa == 0.0) return 0.0;
  const double magnitude = std::exp(std::log(std::abs(mantissa)) + log_scale);
  if (!std::isfinite(magnitude)) throw RangeError("scaled value exceeds double range");
  return std::copysign(magnitude, mantissa);
}

void normalized_hermite_table(double alpha, double x, std::span<ScaledValue> out) {
  const double log_n0 = 0.5 * (std::log(alpha) - 0.5 * std::log(std::numbers::pi));
  normalized_sweep(alpha * x, log_n0, out);
}

void eigenfunction_table(const OscillatorModel& model, double x, std::span<double> out) {
  if (out.empty()) return;
  const double alpha = model.alpha();
  const double xi = alpha * x;
  const double log_psi0 = 0.5 * (std::log(alpha) - 0.5 * std::log(std::numbers::pi)) - 0.5 * xi * xi;
  std::vector<ScaledValue> scaled(out.size());
  normalized_sweep(xi, log_psi0, scaled);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = scaled[n].value();
}

double eigenfunction_eval(const OscillatorModel& model, std::size_t n, double x) {
  std::vector<double> values(n + 1);
  eigenfunction_table(model, x, values);
  return values[n];
}

double x2_half_matrix_element(const OscillatorModel& model, std::size_t row, std::size_t col) {
  const std::size_t lo = std::min(row, col);
  const std::size_t hi = std::max(row, col);
  // x^2 = (a + a^dagger)^2 / (2 alpha^2)
  const double inv_alpha2 = 1.0 / (model.alpha() * model.alpha());
  const double n = static_cast<double>(lo);
  if (hi == lo) return 0.25 * (2.0 * n + 1.0) * inv_alpha2;
  if (hi == lo + 2) return 0.25 * std::sqrt((n + 1.0) * (n + 2.0)) * inv_alpha2;
  return 0.0;
}

Eigen::MatrixXd sample_basis(const OscillatorModel& model, std::size_t n_max, const GridSpec& grid) {
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(grid.points), static_cast<Eigen::Index>(n_max + 1));
  std::vector<double> row(n_max + 1);
  for (std::size_t i = 0; i < grid.points; ++i) {
    eigenfunction_table(model, grid.x(i), row);
    for (std::size_t n = 0; n <= n_max; ++n) {
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = row[n];
    }
  }
  return basis;
}

Eigen::MatrixXd overlap_matrix(const OscillatorModel& model_a, std::size_t n_max_a, const OscillatorModel& model_b,
                               std::size_t n_max_b, const GridSpec& grid) {
  const Eigen::MatrixXd a = sample_basis(model_a, n_max_a, grid);
  const Eigen::MatrixXd b = sample_basis(model_b, n_max_b, grid);
  const Eigen::Index last = a.rows() - 1;
  const double edge = std::max({a.row(0).cwiseAbs().maxCoeff(), a.row(last).cwiseAbs().maxCoeff(),
                                b.row(0).cwiseAbs().maxCoeff(), b.row(last).cwiseAbs().maxCoeff()});
  if (edge > 1e-12 * std::min(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff())) {
    throw GridTooSmallError("basis functions do not decay within the quadrature grid");
  }
  return (a.transpose() * b) * grid.spacing();
}

double overlap_quadrature(const OscillatorModel& model_a, std::size_t n_a, const OscillatorModel& model_b,
                          std::size_t n_b, const GridSpec& grid) {
  if (grid.points < 2 || !(grid.half_width > 0.0)) throw std::invalid_argument("degenerate quadrature grid");
  std::vector<double> integrand(grid.points);
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.x(i);
    integrand[i] = eigenfunction_eval(model_a, n_a, x) * eigenfunction_eval(model_b, n_b, x);
    peak = std::max(peak, std::abs(integrand[i]));
  }
  const double edge = std::max(std::abs(integrand.front()), std::abs(integrand.back()));
  if (edge > 1e-12 * peak) {
    throw GridTooSmallError("integrand at the grid boundary is " + std::to_string(edge / peak) + " of its peak");
  }
  // Endpoint terms are negligible by the check above, so the trapezoid rule is a plain sum.
  double sum = 0.0;
  for (double v : integrand) sum += v;
  return sum * grid.spacing();
}

double overlap_quadrature(const OscillatorModel& model_a, std::size_t n_a, const OscillatorModel& model_b,
                          std::size_t n_b) {
  const double alpha_min = std::min(model_a.alpha(), model_b.alpha());
  return overlap_quadrature(model_a, n_a, model_b, n_b, default_quadrature_grid(std::max(n_a, n_b), alpha_min));
}

}  // namespace hoexp
