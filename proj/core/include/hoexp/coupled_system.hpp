#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hoexp/hamiltonian_schedule.hpp"
#include "hoexp/oscillator_basis.hpp"

namespace hoexp {

/// How the active set of expansion coefficients evolves.
struct BasisPolicy {
  enum class Kind {
    /// Start from C_0 alone and open one new slot per integration step.
    Growing,
    /// A fixed number of slots; the truncated system is Hermitian.
    Fixed,
  };

  Kind kind = Kind::Growing;
  std::size_t fixed_slots = 512;

  static BasisPolicy growing() { return {Kind::Growing, 0}; }
  static BasisPolicy fixed(std::size_t slots = 512) { return {Kind::Fixed, slots}; }

  friend bool operator==(const BasisPolicy&, const BasisPolicy&) = default;
};

/// Which eigenstate indices the slots address.
enum class IndexLayout {
  /// slot j holds n = 2j; the ground state never couples to odd n.
  EvenOnly,
  /// slot j holds n = j.
  Full,
};

std::string_view to_string(IndexLayout layout);

/// Interaction-picture coefficients C_n(t) over the active slots.
///
/// Amplitudes are stored as std::complex<double>, so the same memory can be
/// viewed as the interleaved real/imaginary vector the stepper advances.
class CoefficientState {
 public:
  CoefficientState(BasisPolicy policy, IndexLayout layout, std::size_t slots);

  [[nodiscard]] const BasisPolicy& policy() const noexcept { return policy_; }
  [[nodiscard]] IndexLayout layout() const noexcept { return layout_; }
  [[nodiscard]] std::size_t stride() const noexcept { return layout_ == IndexLayout::EvenOnly ? 2 : 1; }
  [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
  /// Eigenstate index addressed by `slot`.
  [[nodiscard]] std::size_t index(std::size_t slot) const noexcept { return stride() * slot; }

  [[nodiscard]] double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }
  void set_steps(std::uint64_t steps) noexcept { steps_ = steps; }

  [[nodiscard]] std::span<std::complex<double>> amplitudes() noexcept { return amplitudes_; }
  [[nodiscard]] std::span<const std::complex<double>> amplitudes() const noexcept { return amplitudes_; }
  std::complex<double>& operator[](std::size_t slot) { return amplitudes_[slot]; }
  const std::complex<double>& operator[](std::size_t slot) const { return amplitudes_[slot]; }

  /// Interleaved (re_0, im_0, re_1, im_1, ...) view.
  [[nodiscard]] std::span<double> components() noexcept;
  [[nodiscard]] std::span<const double> components() const noexcept;

  /// Appends one zero slot (the next index of the layout).
  void append_slot() { amplitudes_.emplace_back(0.0, 0.0); }

  /// True if every component is finite.
  [[nodiscard]] bool finite() const noexcept;

 private:
  BasisPolicy policy_;
  IndexLayout layout_;
  double time_ = 0.0;
  std::uint64_t steps_ = 0;
  std::vector<std::complex<double>> amplitudes_;
};

/// C_0 = 1, everything else zero, t = 0.
CoefficientState initial_state(BasisPolicy policy, IndexLayout layout = IndexLayout::EvenOnly);

/// Right-hand side of the coupled coefficient equations for a fixed model and schedule.
///
/// In real/imaginary form with V_{nl} evaluated at t and phi = 2 omega t:
///   dC^r_n/dt =  ([C^i_{n-2} cos phi + C^r_{n-2} sin phi] V_{n-2,n} + C^i_n V_{nn}
///                + [C^i_{n+2} cos phi - C^r_{n+2} sin phi] V_{n,n+2}) / hbar
///   dC^i_n/dt = -([C^r_{n-2} cos phi - C^i_{n-2} sin phi] V_{n-2,n} + C^r_n V_{nn}
///                + [C^r_{n+2} cos phi + C^i_{n+2} sin phi] V_{n,n+2}) / hbar
/// Slots outside the active set count as zero.
class CoupledSystem {
 public:
  CoupledSystem(OscillatorModel model, RampSchedule schedule, IndexLayout layout);

  [[nodiscard]] const OscillatorModel& model() const noexcept { return model_; }
  [[nodiscard]] const RampSchedule& schedule() const noexcept { return schedule_; }
  [[nodiscard]] IndexLayout layout() const noexcept { return layout_; }

  /// Precomputes matrix elements for the first `slots` slots.
  void reserve(std::size_t slots);

  /// `y` and `dy` are interleaved component vectors of equal length.
  void evaluate(double t, std::span<const double> y, std::span<double> dy) const;

 private:
  [[nodiscard]] double diagonal(std::size_t slot) const noexcept;
  [[nodiscard]] double upper(std::size_t slot) const noexcept;

  OscillatorModel model_;
  RampSchedule schedule_;
  IndexLayout layout_;
  std::size_t neighbour_ = 1;
  std::vector<double> diagonal_;
  std::vector<double> upper_;
};

/// dC/dt at time t.
struct RhsEvaluation {
  double time = 0.0;
  /// One entry per slot; under the growing policy one extra frontier slot is included.
  std::vector<std::complex<double>> derivative;
};

/// Throws NonFiniteError on non-finite input.
RhsEvaluation rhs(const CoefficientState& state, const RampSchedule& schedule, const OscillatorModel& model,
                  double t);

/// Copy of `state` with one more zero slot. Throws PolicyError for fixed truncation.
CoefficientState grow_frontier(const CoefficientState& state);

/// Real-plus-imaginary variable count of a growing state, counting each slot
/// opened after the first once per Runge-Kutta stage vector: 8 s + 2 after s steps.
std::size_t stage_variable_count(const CoefficientState& state);

struct ModeAmplitude {
  std::size_t index = 0;
  std::complex<double> amplitude;
};

/// Schrodinger-picture amplitudes C_n(t) exp(-i E_n t / hbar).
std::vector<ModeAmplitude> to_complex_amplitudes(const CoefficientState& state, const OscillatorModel& model);

}  // namespace hoexp
