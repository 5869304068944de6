#include "hoexp/series_analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hoexp/errors.hpp"
#include "hoexp/oscillator_basis.hpp"
#include "hoexp/summation.hpp"

namespace hoexp {

namespace {

const double kSqrt6OverPi = std::sqrt(6.0) / std::numbers::pi;

// E_n C_n / (hbar omega); the inverse-linear rule has sqrt(6)/pi pulled out,
// leaving (n + 1/2)/(n + 1).
double term_weight(const SeriesSpec& spec, std::size_t n) {
  const double nd = static_cast<double>(n);
  if (spec.rule == CoefficientRule::InverseLinear) return (nd + 0.5) / (nd + 1.0);
  return (nd + 0.5) * coefficient(spec, n);
}

}  // namespace

double coefficient(const SeriesSpec& spec, std::size_t n) {
  switch (spec.rule) {
    case CoefficientRule::InverseLinear:
      return kSqrt6OverPi / (static_cast<double>(n) + 1.0);
    case CoefficientRule::Custom:
      if (!spec.custom) throw std::invalid_argument("custom coefficient rule without a function");
      return spec.custom(n);
  }
  return 0.0;
}

double coefficient_norm_partial_sum(const SeriesSpec& spec, std::size_t n_last) {
  CompensatedSum sum;
  // Smallest terms first.
  for (std::size_t n = n_last + 1; n-- > 0;) {
    const double c = coefficient(spec, n);
    sum += c * c;
  }
  return sum.value();
}

std::vector<double> differentiated_partial_sums(const SeriesSpec& spec, std::span<const std::size_t> n_lasts,
                                                double x) {
  if (n_lasts.empty()) return {};
  const std::size_t top = *std::max_element(n_lasts.begin(), n_lasts.end());
  std::vector<ScaledValue> table(top + 1);
  normalized_hermite_table(spec.alpha, x, table);
  const double gaussian_log = spec.include_gaussian ? -0.5 * spec.alpha * spec.alpha * x * x : 0.0;

  // Running sum as mantissa * exp(scale); the sweep's scale never decreases.
  std::vector<double> prefix(top + 1);
  double sum = 0.0;
  double scale = table[0].log_scale;
  std::vector<double> prefix_scale(top + 1);
  for (std::size_t n = 0; n <= top; ++n) {
    if (table[n].log_scale != scale) {
      sum *= std::exp(scale - table[n].log_scale);
      scale = table[n].log_scale;
    }
    sum += term_weight(spec, n) * table[n].mantissa;
    prefix[n] = sum;
    prefix_scale[n] = scale;
  }

  std::vector<double> out;
  out.reserve(n_lasts.size());
  for (std::size_t n : n_lasts) {
    const ScaledValue v{prefix[n], prefix_scale[n] + gaussian_log};
    const double value = v.value();
    if (!std::isfinite(value)) throw RangeError("differentiated partial sum is not finite");
    out.push_back(value);
  }
  return out;
}

double differentiated_partial_sum(const SeriesSpec& spec, std::size_t n_last, double x) {
  const std::size_t n[] = {n_last};
  return differentiated_partial_sums(spec, n, x).front();
}

double log_comparison_term(std::size_t n, double x, double alpha) {
  const double nd = static_cast<double>(n);
  if (n == 0) return 0.0;
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return nd * std::log(std::abs(2.0 * alpha * x)) - 0.5 * (nd * std::numbers::ln2 + std::lgamma(nd + 1.0));
}

double log_differentiated_term(const SeriesSpec& spec, std::size_t n, double x) {
  std::vector<ScaledValue> table(n + 1);
  normalized_hermite_table(spec.alpha, x, table);
  const double w = term_weight(spec, n);
  if (table[n].mantissa == 0.0 || w == 0.0) return -std::numeric_limits<double>::infinity();
  double log_value = std::log(std::abs(w * table[n].mantissa)) + table[n].log_scale;
  if (spec.include_gaussian) log_value -= 0.5 * spec.alpha * spec.alpha * x * x;
  return log_value;
}

double comparison_series(std::size_t n_last, double x, double alpha) {
  if (x == 0.0) return 1.0;
  CompensatedSum sum;
  for (std::size_t n = 0; n <= n_last; ++n) {
    const double magnitude = std::exp(log_comparison_term(n, x, alpha));
    if (!std::isfinite(magnitude)) throw RangeError("comparison series term overflows");
    sum += (x < 0.0 && n % 2 == 1) ? -magnitude : magnitude;
  }
  const double value = sum.value();
  if (!std::isfinite(value)) throw RangeError("comparison series overflows");
  return value;
}

std::vector<GrowthRow> sup_growth_profile(const SeriesSpec& spec, std::span<const std::size_t> n_lasts,
                                          std::span<const double> windows, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("x spacing must be positive");
  std::vector<GrowthRow> rows;
  if (n_lasts.empty() || windows.empty()) return rows;
  for (double w : windows) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("window widths must be finite and >= 0");
  }
  for (std::size_t n : n_lasts) {
    for (double w : windows) rows.push_back({n, w, 0.0, 0.0});
  }
  const double widest = *std::max_element(windows.begin(), windows.end());
  const auto points = static_cast<std::size_t>(std::floor(widest / dx + 1e-9));
  for (std::size_t i = 0; i <= points; ++i) {
    const double x = static_cast<double>(i) * dx;
    const auto sums = differentiated_partial_sums(spec, n_lasts, x);
    for (std::size_t a = 0; a < n_lasts.size(); ++a) {
      for (std::size_t b = 0; b < windows.size(); ++b) {
        if (x > windows[b] + 1e-12) continue;
        GrowthRow& row = rows[a * windows.size() + b];
        if (std::abs(sums[a]) > row.sup_lower_bound) {
          row.sup_lower_bound = std::abs(sums[a]);
          row.argmax = x;
        }
      }
    }
  }
  return rows;
}

}  // namespace hoexp
