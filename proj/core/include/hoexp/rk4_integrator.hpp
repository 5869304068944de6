#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hoexp/coupled_system.hpp"

namespace hoexp {

/// Classic four-stage Runge-Kutta:
///   z1 = h f(y, t)
///   z2 = h f(y + z1/2, t + h/2)
///   z3 = h f(y + z2/2, t + h/2)
///   z4 = h f(y + z3, t + h)
///   y <- y + (z1 + 2 z2 + 2 z3 + z4) / 6
///
/// Keeps its stage buffers between calls; one stepper per trajectory.
class Rk4Stepper {
 public:
  /// `field(t, y, dy)` writes dy/dt into `dy`.
  template <class Field>
  void step(Field&& field, double t, std::span<double> y, double h) {
    const std::size_t n = y.size();
    resize(n);
    const double half = 0.5 * h;

    field(t, std::span<const double>(y), std::span<double>(z1_));
    for (std::size_t i = 0; i < n; ++i) {
      z1_[i] *= h;
      tmp_[i] = y[i] + 0.5 * z1_[i];
    }
    field(t + half, std::span<const double>(tmp_), std::span<double>(z2_));
    for (std::size_t i = 0; i < n; ++i) {
      z2_[i] *= h;
      tmp_[i] = y[i] + 0.5 * z2_[i];
    }
    field(t + half, std::span<const double>(tmp_), std::span<double>(z3_));
    for (std::size_t i = 0; i < n; ++i) {
      z3_[i] *= h;
      tmp_[i] = y[i] + z3_[i];
    }
    field(t + h, std::span<const double>(tmp_), std::span<double>(z4_));
    for (std::size_t i = 0; i < n; ++i) {
      z4_[i] *= h;
      y[i] += (z1_[i] + 2.0 * z2_[i] + 2.0 * z3_[i] + z4_[i]) / 6.0;
    }
  }

 private:
  void resize(std::size_t n) {
    if (tmp_.size() == n) return;
    z1_.resize(n);
    z2_.resize(n);
    z3_.resize(n);
    z4_.resize(n);
    tmp_.resize(n);
  }

  std::vector<double> z1_, z2_, z3_, z4_, tmp_;
};

/// One step of `state` under `system`. A growing state gets its new frontier
/// slot before the first stage. Advances time by h and the step counter by one.
void rk4_step(CoefficientState& state, const CoupledSystem& system, double h, Rk4Stepper& stepper);
CoefficientState rk4_step(const CoefficientState& state, const CoupledSystem& system, double h);

struct StepperConfig {
  double step = 1e-3;
  std::uint64_t step_count = 0;
  /// Stop once the norm exceeds this value.
  double abort_norm = 1e6;

  /// Throws std::invalid_argument unless end_time is a whole number of steps.
  static StepperConfig until(double step, double end_time, double abort_norm = 1e6);
  [[nodiscard]] double end_time() const noexcept { return static_cast<double>(step_count) * step; }
  void validate() const;
};

enum class IntegrationStatus {
  Completed,
  NonFinite,
  NormCeiling,
};

std::string_view to_string(IntegrationStatus status);

struct IntegrationResult {
  CoefficientState state;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::string message;
};

using StateObserver = std::function<void(const CoefficientState&)>;

/// Advances `initial` for config.step_count steps with t_j = t_0 + j h.
/// Observers see the initial state and the state after every step.
IntegrationResult integrate(CoefficientState initial, const StepperConfig& config, CoupledSystem& system,
                            std::span<const StateObserver> observers = {});

}  // namespace hoexp
