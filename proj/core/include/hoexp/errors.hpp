#pragma once

#include <stdexcept>
#include <string>

namespace hoexp {

/// Intermediate or final value left the representable range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A propagated quantity became NaN or infinite.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature grid does not cover the support of the integrand.
class GridTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid wavefunction leaked to the domain boundary during propagation.
class DomainOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation requested for a schedule variant or basis policy that does not support it.
class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hoexp
