#include "hoexp/hamiltonian_schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hoexp/errors.hpp"

namespace hoexp {

std::string_view to_string(RampVariant variant) {
  switch (variant) {
    case RampVariant::RampUp:
      return "ramp-up";
    case RampVariant::RampDown:
      return "ramp-down";
  }
  return "unknown";
}

RampVariant parse_ramp_variant(std::string_view text) {
  if (text == "ramp-up") return RampVariant::RampUp;
  if (text == "ramp-down") return RampVariant::RampDown;
  throw std::invalid_argument("unknown ramp variant '" + std::string(text) + "'");
}

void RampSchedule::validate() const {
  if (!std::isfinite(rate)) throw std::invalid_argument("ramp rate must be finite");
  if (!std::isfinite(end) || !(end > 0.0)) throw std::invalid_argument("ramp end time must be positive");
}

double RampSchedule::scalar_factor(double t) const noexcept {
  if (t <= 0.0) return 0.0;
  switch (variant) {
    case RampVariant::RampUp:
      return t < end ? rate * t : rate * end;
    case RampVariant::RampDown:
      if (ramp_down_plateau && t >= end) return -rate * end;
      return -rate * t;
  }
  return 0.0;
}

CouplingRow coupling_row(const RampSchedule& schedule, const OscillatorModel& model, std::size_t n, double t) {
  const double scale = schedule.scalar_factor(t) * model.spring();
  CouplingRow row;
  row.index = n;
  row.diagonal = scale * x2_half_matrix_element(model, n, n);
  row.super = scale * x2_half_matrix_element(model, n, n + 2);
  row.sub = n >= 2 ? scale * x2_half_matrix_element(model, n, n - 2) : 0.0;
  row.omega_super = -2.0 * model.omega();
  row.omega_sub = 2.0 * model.omega();
  row.omega_diagonal = 0.0;
  return row;
}

OscillatorModel post_ramp_model(const RampSchedule& schedule, const OscillatorModel& model) {
  if (schedule.variant != RampVariant::RampUp) {
    throw PolicyError("ramp-down variation has no final Hamiltonian");
  }
  return model.with_spring(model.spring() * schedule.spring_scale(schedule.end));
}

}  // namespace hoexp
