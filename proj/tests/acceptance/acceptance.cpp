// Runs each acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hoexp/diagnostics.hpp"
#include "hoexp/experiment.hpp"
#include "hoexp/oscillator_basis.hpp"
#include "hoexp/reference_oracles.hpp"
#include "hoexp/rk4_integrator.hpp"
#include "hoexp/series_analyzer.hpp"
#include "oracles.hpp"

using namespace hoexp;

namespace {

const RampSchedule kRamp{1.0, 1.0, RampVariant::RampUp};
const OscillatorModel kUnit = OscillatorModel::unit();

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, double value) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, fmt, value);
    if (!detail.empty()) detail += "; ";
    detail += buffer;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
  void note(const char* fmt, double value) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, fmt, value);
    if (!detail.empty()) detail += "; ";
    detail += buffer;
  }
};

std::vector<DiagnosticsRecord> growing_records() {
  ExperimentConfig c;
  c.population_interval = 0.0;
  return run_trajectory(c).records;
}

std::vector<DiagnosticsRecord> fixed_records(double step, double end, IndexLayout layout = IndexLayout::EvenOnly) {
  CoupledSystem system(kUnit, kRamp, layout);
  DiagnosticsRecorder recorder(kUnit);
  const StateObserver obs[] = {[&](const CoefficientState& s) { recorder.observe(s); }};
  integrate(initial_state(BasisPolicy::fixed(512), layout), StepperConfig::until(step, end), system, obs);
  return recorder.records();
}

double max_norm_drift(const std::vector<DiagnosticsRecord>& records) {
  double drift = 0.0;
  for (const auto& r : records) drift = std::max(drift, std::abs(r.norm - 1.0));
  return drift;
}

Outcome norm_breakdown(const std::vector<DiagnosticsRecord>& growing) {
  Outcome o;
  const BreakdownReport b = detect_breakdown(growing, 0.1, kUnit.omega());
  o.require(b.detected() && *b.time < 6.28, "10%% deviation at t = %.3f (< 6.28)", b.detected() ? *b.time : NAN);
  double over_100 = NAN;
  for (const auto& r : growing) {
    if (r.norm > 100.0) {
      over_100 = r.time;
      break;
    }
  }
  o.require(over_100 < 3.2 && (!b.detected() || over_100 >= *b.time), "norm > 100 at t = %.3f (< 3.2)", over_100);
  return o;
}

Outcome energy_profile(const std::vector<DiagnosticsRecord>& growing) {
  Outcome o;
  o.require(growing.front().energy == 0.5, "E(0) = %.17g", growing.front().energy);
  double entered = NAN;
  for (const auto& r : growing) {
    if (r.time < 2.0 && r.energy > 0.50 && r.energy <= 0.55) {
      entered = r.time;
      break;
    }
  }
  o.require(!std::isnan(entered), "E in (0.50, 0.55] at t = %.3f (< 2)", entered);

  const BreakdownReport b = detect_breakdown(growing, 0.1, kUnit.omega());
  const double settled_until = b.detected() ? *b.time : growing.back().time;
  std::size_t peak = 0;
  for (std::size_t i = 1; i + 1 < growing.size(); ++i) {
    if (growing[i].time > 1.0 && growing[i].time < settled_until && growing[i].energy > growing[i - 1].energy &&
        growing[i].energy > growing[i + 1].energy) {
      peak = i;
      break;
    }
  }
  o.require(peak > 0, "local maximum after t = 1 at t = %.3f", peak > 0 ? growing[peak].time : NAN);
  if (peak > 0) o.note("peak E = %.4f", growing[peak].energy);
  double global_peak = 0.0;
  for (const auto& r : growing) {
    if (r.time < settled_until) global_peak = std::max(global_peak, r.energy);
  }
  o.note("max E before breakdown = %.4f", global_peak);
  const DiagnosticsRecord& last = growing.back();
  o.require(last.energy > 100.0 && last.energy >= 0.5 * last.norm, "final E = %.3g", last.energy);
  o.note("final norm = %.3g", last.norm);
  return o;
}

Outcome oracle_cross_validation() {
  Outcome o;
  ExperimentConfig fixed;
  fixed.solver = SolverKind::Fixed;
  fixed.basis_size = 512;
  fixed.end_time = 1.0;
  fixed.cadence = 10;
  fixed.population_interval = 0.01;
  fixed.population_max_index = 100;
  ExperimentConfig grid = fixed;
  grid.solver = SolverKind::Grid;
  const ComparisonReport r = compare_solvers(fixed, grid);
  o.require(r.aligned_population_samples == 101, "aligned population samples = %.0f",
            static_cast<double>(r.aligned_population_samples));
  o.require(r.max_population_difference < 1e-4, "max |P_fixed - P_grid| = %.3g (< 1e-4)", r.max_population_difference);

  GridPropagator propagator(kUnit, kRamp, kOracleGrid, 1e-4);
  GridWavefunction w = eigenstate_on_grid(kUnit, 0);
  std::vector<GridWavefunction> snapshots;
  propagator.advance(w, 1.0, [&](const GridWavefunction& s) {
    const long long tick = std::llround(s.time * 1e4);
    if (tick > 0 && tick % 1000 == 0) snapshots.push_back(s);
  });
  std::vector<double> times;
  for (const auto& s : snapshots) times.push_back(s.time);
  const auto gaussians = gaussian_trajectory(kRamp, kUnit, times);
  double worst = 0.0;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    worst = std::max(worst, aligned_max_difference(snapshots[i].psi, gaussian_on_grid(gaussians[i], kUnit).psi));
  }
  o.require(snapshots.size() == 10, "snapshots = %.0f", static_cast<double>(snapshots.size()));
  o.require(worst < 1e-5, "max aligned |psi_grid - psi_gauss| = %.3g (< 1e-5)", worst);
  return o;
}

Outcome norm_conservation(const std::vector<DiagnosticsRecord>& fixed_h, const std::vector<DiagnosticsRecord>& fixed_h2) {
  Outcome o;
  const double d1 = max_norm_drift(fixed_h);
  const double d2 = max_norm_drift(fixed_h2);
  o.require(d1 < 1e-8, "max |norm - 1| (h = 1e-3) = %.3g (< 1e-8)", d1);
  o.note("max |norm - 1| (h = 5e-4) = %.3g", d2);
  const double ratio = d1 / d2;
  o.require(ratio >= 8.0 && ratio <= 32.0, "drift ratio = %.3g (in [8, 32])", ratio);
  return o;
}

Outcome stationarity() {
  Outcome o;
  ExperimentConfig c;
  c.solver = SolverKind::Grid;
  c.end_time = 3.0;
  c.cadence = 10;
  c.population_interval = 0.01;
  c.population_max_index = 100;
  const StationarityReport r = probe_stationarity(c);
  o.require(r.times.size() == 201, "samples = %.0f", static_cast<double>(r.times.size()));
  o.require(r.max_drift < 1e-6, "max population drift on [1, 3] = %.3g (< 1e-6)", r.max_drift);
  return o;
}

Outcome matrix_elements() {
  Outcome o;
  const std::size_t panels = 8000;
  const double a = -14.0;
  const double h = 28.0 / static_cast<double>(panels);
  std::vector<std::vector<double>> psi(31, std::vector<double>(panels + 1));
  for (std::size_t n = 0; n <= 30; ++n) {
    for (std::size_t i = 0; i <= panels; ++i) psi[n][i] = oracle::psi_explicit(n, 1.0, a + static_cast<double>(i) * h);
  }
  auto sample = [&](double x) { return static_cast<std::size_t>(std::llround((x - a) / h)); };
  double worst = 0.0;
  for (std::size_t m = 0; m <= 30; ++m) {
    for (std::size_t n = 0; n <= 30; ++n) {
      const double quad = oracle::simpson(
          [&](double x) {
            const std::size_t i = sample(x);
            return psi[m][i] * 0.5 * x * x * psi[n][i];
          },
          a, -a, panels);
      worst = std::max(worst, std::abs(x2_half_matrix_element(kUnit, m, n) - quad));
    }
  }
  o.require(worst < 1e-9, "max |element - quadrature| over indices <= 30 = %.3g (< 1e-9)", worst);
  const double e00 = x2_half_matrix_element(kUnit, 0, 0);
  const double e22 = x2_half_matrix_element(kUnit, 2, 2);
  const double e02 = x2_half_matrix_element(kUnit, 0, 2);
  o.require(e00 == 0.25, "<0|x^2/2|0> = %.17g", e00);
  o.require(e22 == 1.25, "<2|x^2/2|2> = %.17g", e22);
  o.require(e02 == 0.5 * std::sqrt(0.5), "<0|x^2/2|2> = %.17g", e02);
  return o;
}

Outcome energy_floor(const std::vector<std::vector<DiagnosticsRecord>*>& runs) {
  Outcome o;
  double worst = INFINITY;
  std::size_t count = 0;
  for (const auto* run : runs) {
    for (const auto& r : *run) {
      worst = std::min(worst, r.energy - 0.5 * r.norm + 1e-12 * std::max(1.0, r.energy));
      ++count;
    }
  }
  o.note("records = %.0f", static_cast<double>(count));
  o.require(worst >= 0.0, "min (E - norm/2 + tol) = %.3g (>= 0)", worst);

  ExperimentConfig down;
  apply_preset(down, "ramp-down");
  down.end_time = 0.1;
  down.cadence = 10;
  down.population_interval = 0.0;
  const Trajectory t = run_trajectory(down);
  double highest = -INFINITY;
  for (std::size_t i = 1; i < t.records.size(); ++i) highest = std::max(highest, t.records[i].energy);
  o.require(t.records.size() > 1 && highest < 0.5, "ramp-down grid max <H(t)> on (0, 0.1] = %.6f (< 0.5)", highest);
  return o;
}

Outcome series_growth() {
  Outcome o;
  SeriesReportConfig config;
  config.n_lasts = {4, 16, 64, 256};
  config.windows = {8.0};
  config.tail_n_lasts = {100, 1000, 10000};
  const SeriesReport r = series_report(config);
  bool increasing = true;
  for (std::size_t i = 1; i < r.growth.size(); ++i) {
    increasing = increasing && r.growth[i].sup_lower_bound > r.growth[i - 1].sup_lower_bound;
  }
  o.require(increasing, "sup strictly increasing along N (sup at N = 4: %.4g)", r.growth.front().sup_lower_bound);
  o.require(r.growth.back().sup_lower_bound > 1e3, "sup at N = 256 = %.4g (> 1e3)", r.growth.back().sup_lower_bound);
  for (const TailRow& row : r.tail) {
    o.require(row.partial_norm >= row.lower_bound && row.partial_norm <= row.upper_bound,
              "N = %.0f partial norm within bounds", static_cast<double>(row.n_last));
  }
  return o;
}

}  // namespace

int main() {
  const auto setup = std::chrono::steady_clock::now();
  std::vector<DiagnosticsRecord> growing = growing_records();
  std::vector<DiagnosticsRecord> fixed_h = fixed_records(1e-3, 3.0);
  std::vector<DiagnosticsRecord> fixed_h2 = fixed_records(5e-4, 3.0);
  std::vector<DiagnosticsRecord> fixed_full = fixed_records(1e-3, 1.0, IndexLayout::Full);

  std::printf("shared expansion runs: %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - setup).count());

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"norm breakdown of the growing basis", [&] { return norm_breakdown(growing); }},
      {"average energy profile of the growing basis", [&] { return energy_profile(growing); }},
      {"oracle cross-validation", oracle_cross_validation},
      {"norm conservation of the fixed truncation", [&] { return norm_conservation(fixed_h, fixed_h2); }},
      {"post-ramp stationarity of the oracle", stationarity},
      {"x^2/2 matrix elements", matrix_elements},
      {"energy floor and ramp-down contrast",
       [&] { return energy_floor({&growing, &fixed_h, &fixed_h2, &fixed_full}); }},
      {"partial sum growth and norm tail", series_growth},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto begin = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    if (!o.pass) ++failures;
    std::printf("%s  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
