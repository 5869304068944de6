#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hoexp/coupled_system.hpp"
#include "hoexp/hamiltonian_schedule.hpp"
#include "hoexp/oscillator_basis.hpp"

namespace hoexp {

/// Sum of |C_n|^2 over the active slots, compensated.
double norm(const CoefficientState& state);

/// Sum of E_n |C_n|^2 over the active slots, compensated.
double average_energy(const CoefficientState& state, const OscillatorModel& model);

struct DiagnosticsRecord {
  double time = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  std::size_t basis_size = 0;
  /// Largest eigenstate index with a nonzero amplitude.
  std::size_t max_index = 0;
  /// |C| of the last active slot.
  double frontier_magnitude = 0.0;
};

DiagnosticsRecord make_record(const CoefficientState& state, const OscillatorModel& model);

/// Collects one record every `cadence` steps (step 0 included).
class DiagnosticsRecorder {
 public:
  explicit DiagnosticsRecorder(OscillatorModel model, std::uint64_t cadence = 1);

  void observe(const CoefficientState& state);
  [[nodiscard]] const std::vector<DiagnosticsRecord>& records() const noexcept { return records_; }

 private:
  OscillatorModel model_;
  std::uint64_t cadence_;
  std::vector<DiagnosticsRecord> records_;
};

struct BreakdownReport {
  /// First sample time with |norm - 1| > threshold; empty if never crossed.
  std::optional<double> time;
  double threshold = 0.1;
  /// 2 pi / omega
  double period = 0.0;
  bool within_one_period = false;

  [[nodiscard]] bool detected() const noexcept { return time.has_value(); }
};

/// Throws std::invalid_argument on an empty series.
BreakdownReport detect_breakdown(std::span<const DiagnosticsRecord> series, double threshold = 0.1,
                                 double omega = 1.0);

struct StationarityReport {
  std::vector<double> times;
  /// Highest index of both bases used in the transformation.
  std::size_t n_max = 0;
  /// populations[s][m] = |D_m(t_s)|^2 in the post-ramp eigenbasis.
  std::vector<std::vector<double>> populations;
  /// drift[m] = max over samples minus min over samples of populations[.][m].
  std::vector<double> drift;
  double max_drift = 0.0;
};

/// max - min over rows, per column.
std::vector<double> population_drift(const std::vector<std::vector<double>>& populations);

/// Expresses each sampled state in the eigenbasis of the post-ramp oscillator
/// and measures how much each population moves across the samples.
///
/// `n_max` = 0 selects the largest index with |C_n| > 1e-15 over the samples,
/// capped at 200. Throws std::invalid_argument for samples taken before the ramp
/// end and PolicyError for a ramp-down schedule.
StationarityReport stationarity_probe(std::span<const CoefficientState> samples, const RampSchedule& schedule,
                                      const OscillatorModel& model, std::size_t n_max = 0);

}  // namespace hoexp
