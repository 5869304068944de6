#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hoexp/errors.hpp"
#include "hoexp/experiment.hpp"
#include "hoexp/version.hpp"

namespace {

using hoexp::ExperimentConfig;

struct Overrides {
  std::string config_file;
  std::string preset;
  std::optional<double> mass, spring, hbar, rate, ramp_end, step, end_time, abort_norm, threshold;
  std::optional<double> population_interval, grid_step;
  std::optional<std::string> variant, solver, layout, out, populations;
  std::optional<std::size_t> basis_size, population_max_index;
  std::optional<std::uint64_t> cadence;
  std::optional<bool> plateau;
};

void add_config_options(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_file, "INI file with [model], [schedule], [solver], [output]");
  app.add_option("--preset", o.preset, "fig1, fig2, ramp-down, oracle-check or series-growth");
  app.add_option("--mass", o.mass);
  app.add_option("--spring", o.spring);
  app.add_option("--hbar", o.hbar);
  app.add_option("--rate", o.rate, "ramp rate eta");
  app.add_option("--ramp-end", o.ramp_end, "ramp end time T");
  app.add_option("--variant", o.variant, "ramp-up or ramp-down");
  app.add_option("--ramp-down-plateau", o.plateau, "hold -eta*T after T in the ramp-down variant");
  app.add_option("--solver", o.solver, "growing, fixed, grid or gaussian");
  app.add_option("--basis-size", o.basis_size, "slots of the fixed truncation");
  app.add_option("--layout", o.layout, "even or full");
  app.add_option("--step", o.step, "RK4 step h");
  app.add_option("--grid-step", o.grid_step, "grid propagator time step");
  app.add_option("--end-time", o.end_time);
  app.add_option("--abort-norm", o.abort_norm, "stop once the norm exceeds this");
  app.add_option("--cadence", o.cadence, "record every n-th step");
  app.add_option("--threshold", o.threshold, "breakdown threshold on |norm - 1|");
  app.add_option("--population-interval", o.population_interval, "0 disables population sampling");
  app.add_option("--population-max-index", o.population_max_index);
  app.add_option("--out", o.out, "output path");
  app.add_option("--populations", o.populations, "population CSV path");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c;
  if (!o.preset.empty()) hoexp::apply_preset(c, o.preset);
  if (!o.config_file.empty()) c = hoexp::load_config(o.config_file, c);
  if (o.mass) c.mass = *o.mass;
  if (o.spring) c.spring = *o.spring;
  if (o.hbar) c.hbar = *o.hbar;
  if (o.rate) c.rate = *o.rate;
  if (o.ramp_end) c.ramp_end = *o.ramp_end;
  if (o.variant) {
    try {
      c.variant = hoexp::parse_ramp_variant(*o.variant);
    } catch (const std::invalid_argument& e) {
      throw hoexp::ConfigError(e.what());
    }
  }
  if (o.plateau) c.ramp_down_plateau = *o.plateau;
  if (o.solver) c.solver = hoexp::parse_solver_kind(*o.solver);
  if (o.basis_size) c.basis_size = *o.basis_size;
  if (o.layout) {
    if (*o.layout == "even") {
      c.layout = hoexp::IndexLayout::EvenOnly;
    } else if (*o.layout == "full") {
      c.layout = hoexp::IndexLayout::Full;
    } else {
      throw hoexp::ConfigError("--layout expects even or full");
    }
  }
  if (o.step) c.step = *o.step;
  if (o.grid_step) c.grid_step = *o.grid_step;
  if (o.end_time) c.end_time = *o.end_time;
  if (o.abort_norm) c.abort_norm = *o.abort_norm;
  if (o.cadence) c.cadence = *o.cadence;
  if (o.threshold) c.breakdown_threshold = *o.threshold;
  if (o.population_interval) c.population_interval = *o.population_interval;
  if (o.population_max_index) c.population_max_index = *o.population_max_index;
  if (o.out) c.output_path = *o.out;
  if (o.populations) c.populations_path = *o.populations;
  c.validate();
  return c;
}

int simulate(const Overrides& o) {
  const ExperimentConfig config = resolve(o);
  const hoexp::RunSummary run = hoexp::run_experiment(config);
  const auto& records = run.trajectory.records;
  std::printf("%s: %zu records to t = %.6g (%s) in %.2f s -> %s\n", std::string(to_string(config.solver)).c_str(),
              records.size(), records.empty() ? 0.0 : records.back().time,
              std::string(to_string(run.trajectory.status)).c_str(), run.wall_seconds,
              config.output_path.string().c_str());
  if (run.breakdown.detected()) {
    std::printf("breakdown: |norm - 1| > %g first at t = %.6g\n", run.breakdown.threshold, *run.breakdown.time);
  }
  if (!run.trajectory.message.empty()) std::printf("%s\n", run.trajectory.message.c_str());
  return run.exit_code;
}

int compare(const Overrides& o, const std::string& solver_a, const std::string& solver_b) {
  ExperimentConfig a = resolve(o);
  ExperimentConfig b = a;
  a.solver = hoexp::parse_solver_kind(solver_a);
  b.solver = hoexp::parse_solver_kind(solver_b);
  a.validate();
  b.validate();
  const hoexp::ComparisonReport report = hoexp::compare_solvers(a, b);
  std::filesystem::path out = o.out ? std::filesystem::path(*o.out) : std::filesystem::path("comparison.json");
  const std::string text = report.to_json().dump(2) + '\n';
  hoexp::write_file_atomic(out, text);
  std::cout << text;
  return hoexp::kExitOk;
}

int series(const Overrides& o, hoexp::SeriesReportConfig& sc, const std::string& triples) {
  std::filesystem::path out = o.out ? std::filesystem::path(*o.out) : std::filesystem::path("series_growth.csv");
  const hoexp::SeriesReport report = hoexp::series_report(sc);
  hoexp::write_file_atomic(out, hoexp::growth_csv(report.growth));
  std::filesystem::path tail = out;
  tail.replace_extension(".tail.csv");
  hoexp::write_file_atomic(tail, hoexp::tail_csv(report.tail));
  if (!triples.empty()) {
    const double x_max = sc.windows.empty() ? 0.0 : *std::max_element(sc.windows.begin(), sc.windows.end());
    hoexp::write_file_atomic(triples, hoexp::series_triples_csv(sc.spec, sc.n_lasts, x_max, sc.dx));
  }
  for (const auto& r : report.growth) {
    std::printf("N = %-6zu window [0, %g]: sup >= %.6g at x = %.4g\n", r.n_last, r.window, r.sup_lower_bound,
                r.argmax);
  }
  for (const auto& r : report.tail) {
    std::printf("N = %-6zu partial norm %.15g in [%.15g, %.15g]\n", r.n_last, r.partial_norm, r.lower_bound,
                r.upper_bound);
  }
  return hoexp::kExitOk;
}

int probe(const Overrides& o) {
  ExperimentConfig config = resolve(o);
  const hoexp::StationarityReport report = hoexp::probe_stationarity(config);
  std::filesystem::path out = o.out ? std::filesystem::path(*o.out) : std::filesystem::path("stationarity.json");
  nlohmann::json j = hoexp::to_json(report);
  j["config"] = config.to_json();
  hoexp::write_file_atomic(out, j.dump(2) + '\n');
  std::printf("%s: %zu samples, n <= %zu, max population drift %.3e -> %s\n",
              std::string(to_string(config.solver)).c_str(), report.times.size(), report.n_max, report.max_drift,
              out.string().c_str());
  return hoexp::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenfunction-expansion propagation of a ramped harmonic oscillator"};
  app.set_version_flag("--version", std::string(hoexp::kVersion));
  app.require_subcommand(1);

  Overrides o;
  auto* sim = app.add_subcommand("simulate", "run one solver and write diagnostics CSV plus manifest");
  add_config_options(*sim, o);

  std::string solver_a;
  std::string solver_b;
  auto* cmp = app.add_subcommand("compare", "run two solvers on the same schedule and report differences");
  add_config_options(*cmp, o);
  cmp->add_option("--solver-a", solver_a)->required();
  cmp->add_option("--solver-b", solver_b)->required();

  hoexp::SeriesReportConfig sc;
  auto* ser = app.add_subcommand("series", "growth of the differentiated partial sums and the norm tail");
  ser->add_option("--preset", o.preset);
  ser->add_option("--n-list", sc.n_lasts, "partial-sum cutoffs");
  ser->add_option("--windows", sc.windows, "right ends of [0, X] windows");
  ser->add_option("--dx", sc.dx, "x spacing of the sup search");
  ser->add_option("--tail-n", sc.tail_n_lasts, "cutoffs of the norm tail table");
  ser->add_option("--out", o.out, "growth CSV; the tail table goes next to it as .tail.csv");
  std::string triples;
  ser->add_option("--triples", triples, "also write n_last,x,value rows over the widest window");

  auto* prb = app.add_subcommand("probe-stationarity", "population drift in the post-ramp eigenbasis");
  add_config_options(*prb, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hoexp::kExitConfigError;
  }

  try {
    if (*sim) return simulate(o);
    if (*cmp) return compare(o, solver_a, solver_b);
    if (*ser) {
      if (!o.preset.empty() && o.preset != "series-growth") {
        throw hoexp::ConfigError("series accepts only the series-growth preset");
      }
      return series(o, sc, triples);
    }
    if (*prb) return probe(o);
  } catch (const hoexp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hoexp::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hoexp::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return hoexp::kExitNumericalFailure;
  }
  return hoexp::kExitOk;
}
