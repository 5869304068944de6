#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hoexp/diagnostics.hpp"
#include "hoexp/experiment_config.hpp"
#include "hoexp/rk4_integrator.hpp"
#include "hoexp/series_analyzer.hpp"

namespace hoexp {

/// Process exit codes of the driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
  kExitBreakdownAbort = 4,
};

/// |c_n(t)|^2 for n = 0..population_max_index (odd entries zero under the even layout).
struct PopulationSample {
  double time = 0.0;
  std::vector<double> populations;
};

/// One solver run. For the grid and Gaussian solvers the record columns mean:
/// norm = sum |psi|^2 dx, energy = <H(t)>, basis_size = grid points (0 for the
/// Gaussian), max_index = highest sampled mode above 1e-14, frontier_mag = boundary |psi| / peak.
struct Trajectory {
  SolverKind solver = SolverKind::Growing;
  std::vector<DiagnosticsRecord> records;
  std::vector<PopulationSample> populations;
  /// <H(0)> at each record; equals records[i].energy for the expansion solvers.
  std::vector<double> initial_hamiltonian_energy;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::string message;
};

/// Runs the configured solver. Numerical exceptions from the oracles propagate.
Trajectory run_trajectory(const ExperimentConfig& config);

/// Column order of every diagnostics CSV.
inline constexpr std::string_view kDiagnosticsHeader = "t,norm,energy,basis_size,max_index,frontier_mag";

std::string diagnostics_csv(std::span<const DiagnosticsRecord> records);
/// Rows `t,solver,n,population`.
std::string populations_csv(const Trajectory& trajectory);

/// Writes `<path>.tmp` and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// `<output>.manifest.json`
std::filesystem::path manifest_path(const std::filesystem::path& output);

struct RunSummary {
  Trajectory trajectory;
  BreakdownReport breakdown;
  double wall_seconds = 0.0;
  int exit_code = kExitOk;
  nlohmann::json manifest;
};

/// Validates, runs, writes the CSV (plus populations if requested) and the manifest.
/// A norm-ceiling stop still writes everything and reports kExitBreakdownAbort.
RunSummary run_experiment(const ExperimentConfig& config);

struct ComparisonReport {
  std::string solver_a;
  std::string solver_b;
  std::size_t aligned_records = 0;
  std::size_t aligned_population_samples = 0;
  double max_norm_difference = 0.0;
  double integrated_norm_difference = 0.0;
  double max_energy_difference = 0.0;
  double integrated_energy_difference = 0.0;
  double max_population_difference = 0.0;
  std::size_t worst_mode = 0;
  double worst_mode_time = 0.0;
  /// First aligned time with |norm_a - norm_b| > disagreement_threshold.
  std::optional<double> first_disagreement;
  double disagreement_threshold = 1e-6;
  std::string status_a;
  std::string status_b;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Aligns samples of both trajectories on a 1e-6 time lattice and reports
/// max and trapezoid-integrated absolute differences. Energies are compared
/// through <H(0)> so expansion and oracle runs measure the same observable.
ComparisonReport compare_trajectories(const Trajectory& a, const Trajectory& b, double disagreement_threshold = 1e-6);

/// Runs both configurations concurrently. Throws ConfigError unless they share model and schedule.
ComparisonReport compare_solvers(const ExperimentConfig& a, const ExperimentConfig& b,
                                 double disagreement_threshold = 1e-6);

struct SeriesReportConfig {
  SeriesSpec spec;
  std::vector<std::size_t> n_lasts{4, 16, 64, 256};
  std::vector<double> windows{2.0, 4.0, 8.0, 16.0};
  double dx = 1e-2;
  std::vector<std::size_t> tail_n_lasts{100, 1000, 10000};
};

struct TailRow {
  std::size_t n_last = 0;
  double partial_norm = 0.0;
  double tail = 0.0;
  /// 1 - 6 / (pi^2 (N + 1))
  double lower_bound = 0.0;
  /// 1 - 6 / (pi^2 (N + 2))
  double upper_bound = 0.0;
};

struct SeriesReport {
  std::vector<GrowthRow> growth;
  std::vector<TailRow> tail;
};

SeriesReport series_report(const SeriesReportConfig& config);
/// Rows `n_last,window,sup_lower_bound,argmax`.
std::string growth_csv(std::span<const GrowthRow> rows);
/// Rows `n_last,partial_norm,tail,lower_bound,upper_bound`.
std::string tail_csv(std::span<const TailRow> rows);
/// Rows `n_last,x,value` of the differentiated partial sums on x = 0, dx, .. <= x_max.
std::string series_triples_csv(const SeriesSpec& spec, std::span<const std::size_t> n_lasts, double x_max, double dx);

/// Samples the configured run every population_interval (0.01 if unset) from
/// the ramp end to end_time and measures population drift in the post-ramp eigenbasis.
/// Expansion solvers go through stationarity_probe; the oracles are projected
/// onto psi_0..psi_{population_max_index} of the post-ramp oscillator.
StationarityReport probe_stationarity(const ExperimentConfig& config);

nlohmann::json to_json(const StationarityReport& report);
nlohmann::json to_json(const BreakdownReport& report);

}  // namespace hoexp
