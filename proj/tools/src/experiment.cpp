#include "hoexp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <sstream>
#include <system_error>

#include "hoexp/errors.hpp"
#include "hoexp/reference_oracles.hpp"
#include "hoexp/version.hpp"

namespace hoexp {

namespace {

std::uint64_t steps_for(double interval, double step) {
  if (interval <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::llround(interval / step));
}

std::size_t highest_populated(const std::vector<double>& populations) {
  std::size_t top = 0;
  for (std::size_t n = 0; n < populations.size(); ++n) {
    if (populations[n] > 1e-14) top = n;
  }
  return top;
}

// <p^2/2m + scale k x^2/2> of the Gaussian state.
double gaussian_energy(const GaussianState& s, double scale, const OscillatorModel& model) {
  const double w = model.omega();
  const double hbar = model.hbar();
  return hbar * std::norm(s.eps_dot) / (4.0 * w) +
         scale * model.spring() * hbar * std::norm(s.eps) / (4.0 * model.mass() * w);
}

GridSpec oracle_grid(const ExperimentConfig& config) { return {config.grid_half_width, config.grid_points}; }

Trajectory expansion_trajectory(const ExperimentConfig& config) {
  const OscillatorModel model = config.model();
  CoupledSystem system(model, config.schedule(), config.layout);
  const StepperConfig stepper = StepperConfig::until(config.step, config.end_time, config.abort_norm);

  Trajectory out;
  out.solver = config.solver;
  DiagnosticsRecorder recorder(model, config.cadence);
  const std::uint64_t every = steps_for(config.population_interval, config.step);
  const std::size_t n_max = config.population_max_index;

  const StateObserver observers[] = {
      [&](const CoefficientState& s) { recorder.observe(s); },
      [&](const CoefficientState& s) {
        if (every == 0 || s.steps() % every != 0) return;
        PopulationSample sample{s.time(), std::vector<double>(n_max + 1, 0.0)};
        for (std::size_t k = 0; k < s.size() && s.index(k) <= n_max; ++k) {
          sample.populations[s.index(k)] = std::norm(s[k]);
        }
        out.populations.push_back(std::move(sample));
      },
  };
  IntegrationResult result = integrate(initial_state(config.policy(), config.layout), stepper, system, observers);
  out.records = recorder.records();
  for (const auto& r : out.records) out.initial_hamiltonian_energy.push_back(r.energy);
  out.status = result.status;
  out.message = std::move(result.message);
  return out;
}

Trajectory grid_trajectory(const ExperimentConfig& config) {
  const OscillatorModel model = config.model();
  const GridSpec grid = oracle_grid(config);
  GridPropagator propagator(model, config.schedule(), grid, config.grid_step);
  GridWavefunction wave = eigenstate_on_grid(model, 0, grid);

  const std::uint64_t record_every = steps_for(config.record_interval(), config.grid_step);
  const std::uint64_t population_every = steps_for(config.population_interval, config.grid_step);
  std::optional<BasisProjector> projector;
  if (population_every > 0) projector.emplace(model, config.population_max_index, grid);

  Trajectory out;
  out.solver = SolverKind::Grid;
  std::size_t max_index = 0;
  std::uint64_t j = 0;
  auto observe = [&](const GridWavefunction& w) {
    if (projector && j % population_every == 0) {
      PopulationSample sample{w.time, projector->project(w).populations()};
      max_index = highest_populated(sample.populations);
      out.populations.push_back(std::move(sample));
    }
    if (j % record_every == 0) {
      out.records.push_back({w.time, w.norm(), propagator.energy(w, w.time), grid.points, max_index,
                             w.boundary_ratio()});
      out.initial_hamiltonian_energy.push_back(propagator.energy(w, 0.0));
    }
    ++j;
  };
  observe(wave);
  propagator.advance(wave, config.end_time, observe);
  return out;
}

std::vector<double> lattice(double interval, double end) {
  std::vector<double> times;
  if (interval <= 0.0) return times;
  const auto count = static_cast<std::uint64_t>(std::floor(end / interval + 1e-9));
  for (std::uint64_t j = 0; j <= count; ++j) times.push_back(static_cast<double>(j) * interval);
  return times;
}

Trajectory gaussian_trajectory_run(const ExperimentConfig& config) {
  const OscillatorModel model = config.model();
  const RampSchedule schedule = config.schedule();
  const GridSpec grid = oracle_grid(config);

  Trajectory out;
  out.solver = SolverKind::Gaussian;
  std::size_t max_index = 0;

  const auto population_times = lattice(config.population_interval, config.end_time);
  if (!population_times.empty()) {
    const BasisProjector projector(model, config.population_max_index, grid);
    for (const auto& s : gaussian_trajectory(schedule, model, population_times, config.gaussian_step)) {
      out.populations.push_back({s.time, projector.project(gaussian_on_grid(s, model, grid)).populations()});
    }
  }

  std::size_t next_population = 0;
  const auto record_times = lattice(config.record_interval(), config.end_time);
  for (const auto& s : gaussian_trajectory(schedule, model, record_times, config.gaussian_step)) {
    while (next_population < out.populations.size() && out.populations[next_population].time <= s.time + 1e-12) {
      max_index = highest_populated(out.populations[next_population].populations);
      ++next_population;
    }
    const GridWavefunction wave = gaussian_on_grid(s, model, grid);
    out.records.push_back({s.time, wave.norm(), gaussian_energy(s, schedule.spring_scale(s.time), model), 0,
                           max_index, wave.boundary_ratio()});
    out.initial_hamiltonian_energy.push_back(gaussian_energy(s, 1.0, model));
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

long long time_key(double t) { return std::llround(t * 1e6); }

}  // namespace

Trajectory run_trajectory(const ExperimentConfig& config) {
  config.validate();
  switch (config.solver) {
    case SolverKind::Growing:
    case SolverKind::Fixed:
      return expansion_trajectory(config);
    case SolverKind::Grid:
      return grid_trajectory(config);
    case SolverKind::Gaussian:
      return gaussian_trajectory_run(config);
  }
  throw ConfigError("unknown solver");
}

std::string diagnostics_csv(std::span<const DiagnosticsRecord> records) {
  std::string out(kDiagnosticsHeader);
  out += '\n';
  for (const auto& r : records) {
    out += format_number(r.time);
    out += ',';
    out += format_number(r.norm);
    out += ',';
    out += format_number(r.energy);
    out += ',';
    out += std::to_string(r.basis_size);
    out += ',';
    out += std::to_string(r.max_index);
    out += ',';
    out += format_number(r.frontier_magnitude);
    out += '\n';
  }
  return out;
}

std::string populations_csv(const Trajectory& trajectory) {
  std::string out = "t,solver,n,population\n";
  const std::string solver(to_string(trajectory.solver));
  for (const auto& sample : trajectory.populations) {
    const std::string t = format_number(sample.time);
    for (std::size_t n = 0; n < sample.populations.size(); ++n) {
      out += t + ',' + solver + ',' + std::to_string(n) + ',' + format_number(sample.populations[n]) + '\n';
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  return p;
}

nlohmann::json to_json(const BreakdownReport& report) {
  nlohmann::json j;
  j["detected"] = report.detected();
  j["time"] = report.time ? nlohmann::json(*report.time) : nlohmann::json(nullptr);
  j["threshold"] = report.threshold;
  j["period"] = report.period;
  j["within_one_period"] = report.within_one_period;
  return j;
}

nlohmann::json to_json(const StationarityReport& report) {
  nlohmann::json j;
  j["n_max"] = report.n_max;
  j["max_drift"] = report.max_drift;
  j["times"] = report.times;
  j["drift"] = report.drift;
  return j;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::string started = timestamp_utc();
  const auto begin = std::chrono::steady_clock::now();

  RunSummary summary;
  summary.trajectory = run_trajectory(config);
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  summary.breakdown =
      detect_breakdown(summary.trajectory.records, config.breakdown_threshold, config.model().omega());

  switch (summary.trajectory.status) {
    case IntegrationStatus::Completed:
      summary.exit_code = kExitOk;
      break;
    case IntegrationStatus::NormCeiling:
      summary.exit_code = kExitBreakdownAbort;
      break;
    case IntegrationStatus::NonFinite:
      summary.exit_code = kExitNumericalFailure;
      break;
  }

  write_file_atomic(config.output_path, diagnostics_csv(summary.trajectory.records));
  if (!config.populations_path.empty()) {
    write_file_atomic(config.populations_path, populations_csv(summary.trajectory));
  }

  nlohmann::json& m = summary.manifest;
  m["version"] = kVersion;
  m["started_utc"] = started;
  m["wall_seconds"] = summary.wall_seconds;
  m["config"] = config.to_json();
  m["solver"] = std::string(to_string(config.solver));
  m["status"] = std::string(to_string(summary.trajectory.status));
  m["message"] = summary.trajectory.message;
  m["exit_code"] = summary.exit_code;
  m["records"] = summary.trajectory.records.size();
  m["final_time"] = summary.trajectory.records.empty() ? 0.0 : summary.trajectory.records.back().time;
  m["breakdown"] = to_json(summary.breakdown);
  m["columns"] = std::string(kDiagnosticsHeader);
  write_file_atomic(manifest_path(config.output_path), m.dump(2) + '\n');
  return summary;
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json j;
  j["solver_a"] = solver_a;
  j["solver_b"] = solver_b;
  j["status_a"] = status_a;
  j["status_b"] = status_b;
  j["aligned_records"] = aligned_records;
  j["aligned_population_samples"] = aligned_population_samples;
  j["max_norm_difference"] = max_norm_difference;
  j["integrated_norm_difference"] = integrated_norm_difference;
  j["max_energy_difference"] = max_energy_difference;
  j["integrated_energy_difference"] = integrated_energy_difference;
  j["max_population_difference"] = max_population_difference;
  j["worst_mode"] = worst_mode;
  j["worst_mode_time"] = worst_mode_time;
  j["disagreement_threshold"] = disagreement_threshold;
  j["first_disagreement"] = first_disagreement ? nlohmann::json(*first_disagreement) : nlohmann::json(nullptr);
  return j;
}

ComparisonReport compare_trajectories(const Trajectory& a, const Trajectory& b, double disagreement_threshold) {
  ComparisonReport report;
  report.solver_a = to_string(a.solver);
  report.solver_b = to_string(b.solver);
  report.status_a = to_string(a.status);
  report.status_b = to_string(b.status);
  report.disagreement_threshold = disagreement_threshold;

  std::map<long long, std::size_t> records_b;
  for (std::size_t i = 0; i < b.records.size(); ++i) records_b.emplace(time_key(b.records[i].time), i);
  auto energy_of = [](const Trajectory& t, std::size_t i) {
    return i < t.initial_hamiltonian_energy.size() ? t.initial_hamiltonian_energy[i] : t.records[i].energy;
  };
  double prev_t = 0.0;
  double prev_norm = 0.0;
  double prev_energy = 0.0;
  bool have_prev = false;
  for (std::size_t ia = 0; ia < a.records.size(); ++ia) {
    const DiagnosticsRecord& ra = a.records[ia];
    const auto it = records_b.find(time_key(ra.time));
    if (it == records_b.end()) continue;
    const DiagnosticsRecord& rb = b.records[it->second];
    const double dn = std::abs(ra.norm - rb.norm);
    const double de = std::abs(energy_of(a, ia) - energy_of(b, it->second));
    ++report.aligned_records;
    report.max_norm_difference = std::max(report.max_norm_difference, dn);
    report.max_energy_difference = std::max(report.max_energy_difference, de);
    if (!report.first_disagreement && !(dn <= disagreement_threshold)) report.first_disagreement = ra.time;
    if (have_prev) {
      report.integrated_norm_difference += 0.5 * (ra.time - prev_t) * (dn + prev_norm);
      report.integrated_energy_difference += 0.5 * (ra.time - prev_t) * (de + prev_energy);
    }
    prev_t = ra.time;
    prev_norm = dn;
    prev_energy = de;
    have_prev = true;
  }

  std::map<long long, const PopulationSample*> populations_b;
  for (const auto& s : b.populations) populations_b.emplace(time_key(s.time), &s);
  for (const auto& pa : a.populations) {
    const auto it = populations_b.find(time_key(pa.time));
    if (it == populations_b.end()) continue;
    const PopulationSample& pb = *it->second;
    ++report.aligned_population_samples;
    const std::size_t modes = std::min(pa.populations.size(), pb.populations.size());
    for (std::size_t n = 0; n < modes; ++n) {
      const double d = std::abs(pa.populations[n] - pb.populations[n]);
      if (d > report.max_population_difference) {
        report.max_population_difference = d;
        report.worst_mode = n;
        report.worst_mode_time = pa.time;
      }
    }
  }
  return report;
}

ComparisonReport compare_solvers(const ExperimentConfig& a, const ExperimentConfig& b, double disagreement_threshold) {
  a.validate();
  b.validate();
  const RampSchedule sa = a.schedule();
  const RampSchedule sb = b.schedule();
  if (!(a.model() == b.model()) || sa.rate != sb.rate || sa.end != sb.end || sa.variant != sb.variant ||
      sa.ramp_down_plateau != sb.ramp_down_plateau) {
    throw ConfigError("compared runs must share model and schedule");
  }
  auto future_a = std::async(std::launch::async, [&] { return run_trajectory(a); });
  Trajectory tb = run_trajectory(b);
  Trajectory ta = future_a.get();
  return compare_trajectories(ta, tb, disagreement_threshold);
}

SeriesReport series_report(const SeriesReportConfig& config) {
  SeriesReport report;
  report.growth = sup_growth_profile(config.spec, config.n_lasts, config.windows, config.dx);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t n : config.tail_n_lasts) {
    TailRow row;
    row.n_last = n;
    row.partial_norm = coefficient_norm_partial_sum(config.spec, n);
    row.tail = 1.0 - row.partial_norm;
    row.lower_bound = 1.0 - 6.0 / (pi2 * (static_cast<double>(n) + 1.0));
    row.upper_bound = 1.0 - 6.0 / (pi2 * (static_cast<double>(n) + 2.0));
    report.tail.push_back(row);
  }
  return report;
}

std::string growth_csv(std::span<const GrowthRow> rows) {
  std::string out = "n_last,window,sup_lower_bound,argmax\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_last) + ',' + format_number(r.window) + ',' + format_number(r.sup_lower_bound) + ',' +
           format_number(r.argmax) + '\n';
  }
  return out;
}

std::string tail_csv(std::span<const TailRow> rows) {
  std::string out = "n_last,partial_norm,tail,lower_bound,upper_bound\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_last) + ',' + format_number(r.partial_norm) + ',' + format_number(r.tail) + ',' +
           format_number(r.lower_bound) + ',' + format_number(r.upper_bound) + '\n';
  }
  return out;
}

std::string series_triples_csv(const SeriesSpec& spec, std::span<const std::size_t> n_lasts, double x_max,
                               double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("x spacing must be positive");
  std::string out = "n_last,x,value\n";
  const auto points = static_cast<std::size_t>(std::floor(x_max / dx + 1e-9));
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i <= points; ++i) {
    values.push_back(differentiated_partial_sums(spec, n_lasts, static_cast<double>(i) * dx));
  }
  for (std::size_t a = 0; a < n_lasts.size(); ++a) {
    for (std::size_t i = 0; i <= points; ++i) {
      out += std::to_string(n_lasts[a]) + ',' + format_number(static_cast<double>(i) * dx) + ',' +
             format_number(values[i][a]) + '\n';
    }
  }
  return out;
}

StationarityReport probe_stationarity(const ExperimentConfig& config) {
  config.validate();
  const OscillatorModel model = config.model();
  const RampSchedule schedule = config.schedule();
  const OscillatorModel final_model = post_ramp_model(schedule, model);
  const double interval = config.population_interval > 0.0 ? config.population_interval : 0.01;
  const double t_begin = schedule.end;
  if (config.end_time < t_begin) throw ConfigError("end_time precedes the ramp end");

  if (config.solver == SolverKind::Growing || config.solver == SolverKind::Fixed) {
    CoupledSystem system(model, schedule, config.layout);
    const StepperConfig stepper = StepperConfig::until(config.step, config.end_time, config.abort_norm);
    const std::uint64_t every = std::max<std::uint64_t>(1, steps_for(interval, config.step));
    std::vector<CoefficientState> samples;
    const StateObserver observers[] = {[&](const CoefficientState& s) {
      if (s.time() >= t_begin - 1e-12 && s.steps() % every == 0) samples.push_back(s);
    }};
    integrate(initial_state(config.policy(), config.layout), stepper, system, observers);
    if (samples.empty()) throw std::runtime_error("no samples after the ramp end");
    return stationarity_probe(samples, schedule, model);
  }

  const GridSpec grid = oracle_grid(config);
  const BasisProjector projector(final_model, config.population_max_index, grid);
  StationarityReport report;
  report.n_max = config.population_max_index;
  auto take = [&](const GridWavefunction& w) {
    report.times.push_back(w.time);
    report.populations.push_back(projector.project(w).populations());
  };

  if (config.solver == SolverKind::Grid) {
    GridPropagator propagator(model, schedule, grid, config.grid_step);
    GridWavefunction wave = eigenstate_on_grid(model, 0, grid);
    const std::uint64_t every = std::max<std::uint64_t>(1, steps_for(interval, config.grid_step));
    std::uint64_t j = 0;
    propagator.advance(wave, config.end_time, [&](const GridWavefunction& w) {
      ++j;
      if (w.time >= t_begin - 1e-12 && j % every == 0) take(w);
    });
  } else {
    std::vector<double> times;
    for (double t : lattice(interval, config.end_time)) {
      if (t >= t_begin - 1e-12) times.push_back(t);
    }
    for (const auto& s : gaussian_trajectory(schedule, model, times, config.gaussian_step)) {
      take(gaussian_on_grid(s, model, grid));
    }
  }
  if (report.times.empty()) throw std::runtime_error("no samples after the ramp end");
  report.drift = population_drift(report.populations);
  report.max_drift = report.drift.empty() ? 0.0 : *std::max_element(report.drift.begin(), report.drift.end());
  return report;
}

}  // namespace hoexp
