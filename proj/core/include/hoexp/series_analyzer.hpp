#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hoexp {

enum class CoefficientRule {
  /// C_n = sqrt(6) / (pi (n + 1)); the squares sum to one.
  InverseLinear,
  Custom,
};

struct SeriesSpec {
  CoefficientRule rule = CoefficientRule::InverseLinear;
  /// Used when rule == Custom.
  std::function<double(std::size_t)> custom;
  double alpha = 1.0;
  /// Multiply partial sums by exp(-alpha^2 x^2 / 2). Off by default: the
  /// growth question concerns the bracketed series alone.
  bool include_gaussian = false;
};

double coefficient(const SeriesSpec& spec, std::size_t n);

/// sum_{n=0}^{N} |C_n|^2, compensated.
double coefficient_norm_partial_sum(const SeriesSpec& spec, std::size_t n_last);

/// sum_{n=0}^{N} ((n + 1/2)/(n + 1)) N_n H_n(alpha x), the t = 0 series left
/// after differentiating the expansion in time. Throws RangeError if the sum
/// leaves double range.
double differentiated_partial_sum(const SeriesSpec& spec, std::size_t n_last, double x);

/// Partial sums at one x for every truncation in `n_lasts` (any order), from a
/// single recurrence sweep.
std::vector<double> differentiated_partial_sums(const SeriesSpec& spec, std::span<const std::size_t> n_lasts,
                                                double x);

/// sum_{n=0}^{N} (2 alpha x)^n / sqrt(2^n n!), terms evaluated in log space.
double comparison_series(std::size_t n_last, double x, double alpha = 1.0);

/// ln|n-th term| of the differentiated series and of the comparison series.
double log_differentiated_term(const SeriesSpec& spec, std::size_t n, double x);
double log_comparison_term(std::size_t n, double x, double alpha = 1.0);

struct GrowthRow {
  std::size_t n_last = 0;
  double window = 0.0;
  /// Max of |partial sum| over the x grid on [0, window]; a lower bound on the true sup.
  double sup_lower_bound = 0.0;
  double argmax = 0.0;
};

/// For every (N, window) pair, the largest |partial sum| over x in [0, window]
/// sampled with spacing `dx`.
std::vector<GrowthRow> sup_growth_profile(const SeriesSpec& spec, std::span<const std::size_t> n_lasts,
                                          std::span<const double> windows, double dx = 1e-2);

}  // namespace hoexp
