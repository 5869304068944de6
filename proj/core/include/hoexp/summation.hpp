#pragma once

#include <cmath>

namespace hoexp {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace hoexp
