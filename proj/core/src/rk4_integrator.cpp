#include "hoexp/rk4_integrator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hoexp/diagnostics.hpp"

namespace hoexp {

std::string_view to_string(IntegrationStatus status) {
  switch (status) {
    case IntegrationStatus::Completed:
      return "completed";
    case IntegrationStatus::NonFinite:
      return "non-finite";
    case IntegrationStatus::NormCeiling:
      return "norm-ceiling";
  }
  return "unknown";
}

void rk4_step(CoefficientState& state, const CoupledSystem& system, double h, Rk4Stepper& stepper) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  if (state.policy().kind == BasisPolicy::Kind::Growing) state.append_slot();
  auto field = [&system](double t, std::span<const double> y, std::span<double> dy) { system.evaluate(t, y, dy); };
  stepper.step(field, state.time(), state.components(), h);
  state.set_time(state.time() + h);
  state.set_steps(state.steps() + 1);
}

CoefficientState rk4_step(const CoefficientState& state, const CoupledSystem& system, double h) {
  CoefficientState next = state;
  Rk4Stepper stepper;
  rk4_step(next, system, h, stepper);
  return next;
}

StepperConfig StepperConfig::until(double step, double end_time, double abort_norm) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step size must be positive");
  if (!(end_time >= 0.0) || !std::isfinite(end_time)) throw std::invalid_argument("end time must be non-negative");
  const double count = std::round(end_time / step);
  if (std::abs(count * step - end_time) > 1e-9 * std::max(1.0, end_time)) {
    std::ostringstream msg;
    msg << "end time " << end_time << " is not a whole number of steps of " << step;
    throw std::invalid_argument(msg.str());
  }
  StepperConfig config;
  config.step = step;
  config.step_count = static_cast<std::uint64_t>(count);
  config.abort_norm = abort_norm;
  return config;
}

void StepperConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step size must be positive");
  if (!(abort_norm > 0.0)) throw std::invalid_argument("abort norm must be positive");
}

IntegrationResult integrate(CoefficientState initial, const StepperConfig& config, CoupledSystem& system,
                            std::span<const StateObserver> observers) {
  config.validate();
  IntegrationResult result{std::move(initial), IntegrationStatus::Completed, {}};
  CoefficientState& state = result.state;
  if (state.layout() != system.layout()) throw std::invalid_argument("state and system index layouts differ");

  const std::size_t final_slots = state.policy().kind == BasisPolicy::Kind::Growing
                                      ? state.size() + static_cast<std::size_t>(config.step_count)
                                      : state.size();
  system.reserve(final_slots);

  const double t0 = state.time();
  const std::uint64_t s0 = state.steps();
  for (const auto& observe : observers) observe(state);

  Rk4Stepper stepper;
  for (std::uint64_t j = 1; j <= config.step_count; ++j) {
    rk4_step(state, system, config.step, stepper);
    state.set_time(t0 + static_cast<double>(j) * config.step);
    state.set_steps(s0 + j);
    for (const auto& observe : observers) observe(state);

    if (!state.finite()) {
      result.status = IntegrationStatus::NonFinite;
      result.message = "non-finite amplitude at t = " + std::to_string(state.time());
      break;
    }
    const double current_norm = norm(state);
    if (current_norm > config.abort_norm) {
      result.status = IntegrationStatus::NormCeiling;
      std::ostringstream msg;
      msg << "norm " << current_norm << " exceeded ceiling " << config.abort_norm << " at t = " << state.time();
      result.message = msg.str();
      break;
    }
  }
  return result;
}

}  // namespace hoexp
