#pragma once

#include <cstddef>
#include <string_view>

#include "hoexp/oscillator_basis.hpp"

namespace hoexp {

enum class RampVariant {
  /// V(t) = eta t k x^2/2 on (0, T), eta T k x^2/2 afterwards.
  RampUp,
  /// V(t) = -eta t k x^2/2 for all t > 0.
  RampDown,
};

std::string_view to_string(RampVariant variant);
/// Accepts "ramp-up" / "ramp-down". Throws std::invalid_argument otherwise.
RampVariant parse_ramp_variant(std::string_view text);

/// Time profile S(t) of the spring constant, H(t) = p^2/2m + S(t) k x^2/2.
struct RampSchedule {
  double rate = 1.0;
  double end = 1.0;
  RampVariant variant = RampVariant::RampUp;
  /// Hold RampDown at its t = T value afterwards. Off by default.
  bool ramp_down_plateau = false;

  /// Throws std::invalid_argument unless T > 0 and both parameters are finite.
  void validate() const;

  /// s(t) with V(t) = s(t) k x^2/2. Zero for t <= 0; t = T belongs to the plateau.
  [[nodiscard]] double scalar_factor(double t) const noexcept;
  /// S(t) = 1 + s(t).
  [[nodiscard]] double spring_scale(double t) const noexcept { return 1.0 + scalar_factor(t); }
};

/// The possibly nonzero entries of row n of V(t) in the H0 eigenbasis.
struct CouplingRow {
  std::size_t index = 0;
  double diagonal = 0.0;
  /// V_{n,n+2}
  double super = 0.0;
  /// V_{n,n-2}; zero for n < 2.
  double sub = 0.0;
  /// omega_{n,n+2} = (E_n - E_{n+2}) / hbar = -2 omega
  double omega_super = 0.0;
  /// omega_{n,n-2} = +2 omega
  double omega_sub = 0.0;
  double omega_diagonal = 0.0;
};

CouplingRow coupling_row(const RampSchedule& schedule, const OscillatorModel& model, std::size_t n, double t);

/// Oscillator of the final Hamiltonian, spring k (1 + eta T). Throws PolicyError for RampDown.
OscillatorModel post_ramp_model(const RampSchedule& schedule, const OscillatorModel& model);

}  // namespace hoexp
