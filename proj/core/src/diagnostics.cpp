#include "hoexp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "hoexp/summation.hpp"

namespace hoexp {

double norm(const CoefficientState& state) {
  CompensatedSum sum;
  for (const auto& c : state.amplitudes()) sum += std::norm(c);
  return sum.value();
}

double average_energy(const CoefficientState& state, const OscillatorModel& model) {
  CompensatedSum sum;
  for (std::size_t k = 0; k < state.size(); ++k) sum += model.eigenenergy(state.index(k)) * std::norm(state[k]);
  return sum.value();
}

DiagnosticsRecord make_record(const CoefficientState& state, const OscillatorModel& model) {
  DiagnosticsRecord r;
  r.time = state.time();
  r.norm = norm(state);
  r.energy = average_energy(state, model);
  r.basis_size = state.size();
  const auto amps = state.amplitudes();
  for (std::size_t k = amps.size(); k-- > 0;) {
    if (amps[k] != std::complex<double>{}) {
      r.max_index = state.index(k);
      break;
    }
  }
  r.frontier_magnitude = amps.empty() ? 0.0 : std::abs(amps.back());
  return r;
}

DiagnosticsRecorder::DiagnosticsRecorder(OscillatorModel model, std::uint64_t cadence)
    : model_(model), cadence_(cadence == 0 ? 1 : cadence) {}

void DiagnosticsRecorder::observe(const CoefficientState& state) {
  if (state.steps() % cadence_ == 0) records_.push_back(make_record(state, model_));
}

BreakdownReport detect_breakdown(std::span<const DiagnosticsRecord> series, double threshold, double omega) {
  if (series.empty()) throw std::invalid_argument("breakdown detection needs a non-empty series");
  BreakdownReport report;
  report.threshold = threshold;
  report.period = 2.0 * std::numbers::pi / omega;
  for (const auto& r : series) {
    // A non-finite norm is as broken as it gets.
    if (!(std::abs(r.norm - 1.0) <= threshold)) {
      report.time = r.time;
      break;
    }
  }
  report.within_one_period = report.time && *report.time < report.period;
  return report;
}

std::vector<double> population_drift(const std::vector<std::vector<double>>& populations) {
  if (populations.empty()) return {};
  std::vector<double> lo = populations.front();
  std::vector<double> hi = populations.front();
  for (const auto& row : populations) {
    for (std::size_t m = 0; m < row.size() && m < lo.size(); ++m) {
      lo[m] = std::min(lo[m], row[m]);
      hi[m] = std::max(hi[m], row[m]);
    }
  }
  for (std::size_t m = 0; m < lo.size(); ++m) hi[m] -= lo[m];
  return hi;
}

StationarityReport stationarity_probe(std::span<const CoefficientState> samples, const RampSchedule& schedule,
                                      const OscillatorModel& model, std::size_t n_max) {
  const OscillatorModel final_model = post_ramp_model(schedule, model);
  if (samples.empty()) throw std::invalid_argument("stationarity probe needs at least one sample");
  for (const auto& s : samples) {
    if (s.time() < schedule.end - 1e-12) {
      throw std::invalid_argument("stationarity probe sample at t = " + std::to_string(s.time()) +
                                  " precedes the ramp end");
    }
  }

  if (n_max == 0) {
    for (const auto& s : samples) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (std::abs(s[k]) > 1e-15) n_max = std::max(n_max, s.index(k));
      }
    }
    n_max = std::clamp<std::size_t>(n_max, 2, 200);
  }

  const GridSpec grid = default_quadrature_grid(n_max, std::min(model.alpha(), final_model.alpha()));
  // overlaps(m, n) = <psi'_m | psi_n>
  const Eigen::MatrixXd overlaps = overlap_matrix(final_model, n_max, model, n_max, grid);

  StationarityReport report;
  report.n_max = n_max;
  for (const auto& s : samples) {
    Eigen::VectorXcd amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_max + 1));
    for (const auto& mode : to_complex_amplitudes(s, model)) {
      if (mode.index <= n_max) amplitudes(static_cast<Eigen::Index>(mode.index)) = mode.amplitude;
    }
    const Eigen::VectorXcd projected = overlaps.cast<std::complex<double>>() * amplitudes;
    std::vector<double> pops(n_max + 1);
    for (std::size_t m = 0; m <= n_max; ++m) pops[m] = std::norm(projected(static_cast<Eigen::Index>(m)));
    report.times.push_back(s.time());
    report.populations.push_back(std::move(pops));
  }
  report.drift = population_drift(report.populations);
  report.max_drift = report.drift.empty() ? 0.0 : *std::max_element(report.drift.begin(), report.drift.end());
  return report;
}

}  // namespace hoexp
