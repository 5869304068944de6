#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hoexp/coupled_system.hpp"
#include "hoexp/hamiltonian_schedule.hpp"
#include "hoexp/oscillator_basis.hpp"

namespace hoexp {

/// Invalid or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverKind { Growing, Fixed, Grid, Gaussian };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view text);

/// Everything one run needs. Defaults are the reference parameter set:
/// eta = T = m = k = hbar = 1, h = 0.001, growing basis.
struct ExperimentConfig {
  // [model]
  double mass = 1.0;
  double spring = 1.0;
  double hbar = 1.0;

  // [schedule]
  double rate = 1.0;
  double ramp_end = 1.0;
  RampVariant variant = RampVariant::RampUp;
  bool ramp_down_plateau = false;

  // [solver]
  SolverKind solver = SolverKind::Growing;
  std::size_t basis_size = 512;
  IndexLayout layout = IndexLayout::EvenOnly;
  double step = 1e-3;
  double end_time = 3.2;
  double abort_norm = 1e6;
  double grid_half_width = 16.0;
  std::size_t grid_points = 4096;
  double grid_step = 1e-4;
  double gaussian_step = 1e-5;

  // [output]
  /// Record diagnostics every `cadence` expansion steps (cadence * step in time for the oracles).
  std::uint64_t cadence = 1;
  double breakdown_threshold = 0.1;
  /// Time between population samples; 0 disables population sampling.
  double population_interval = 0.01;
  std::size_t population_max_index = 100;
  std::filesystem::path output_path = "diagnostics.csv";
  /// Empty: no population CSV.
  std::filesystem::path populations_path;

  [[nodiscard]] OscillatorModel model() const { return {mass, spring, hbar}; }
  [[nodiscard]] RampSchedule schedule() const { return {rate, ramp_end, variant, ramp_down_plateau}; }
  [[nodiscard]] BasisPolicy policy() const;
  /// Time between diagnostics records.
  [[nodiscard]] double record_interval() const { return static_cast<double>(cadence) * step; }

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Names accepted by apply_preset.
const std::vector<std::string>& preset_names();

/// Overwrites `config` with a named experiment. Throws ConfigError for unknown names.
void apply_preset(ExperimentConfig& config, std::string_view name);

/// Reads a flat `key = value` file with [model], [schedule], [solver] and [output]
/// sections on top of `base`. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

/// The same format, fully resolved.
std::string to_config_text(const ExperimentConfig& config);

}  // namespace hoexp
