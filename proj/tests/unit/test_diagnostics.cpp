#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hoexp/diagnostics.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/rk4_integrator.hpp"

using namespace hoexp;
using cplx = std::complex<double>;

namespace {

const RampSchedule kRamp{1.0, 1.0, RampVariant::RampUp};

std::vector<DiagnosticsRecord> series_of(std::initializer_list<std::pair<double, double>> points) {
  std::vector<DiagnosticsRecord> out;
  for (auto [t, n] : points) out.push_back({t, n, 0.5, 1, 0, 0.0});
  return out;
}

// Samples every `every` steps from the ramp end on.
std::vector<CoefficientState> post_ramp_samples(BasisPolicy policy, const RampSchedule& schedule, double end,
                                                std::uint64_t every) {
  CoupledSystem system(OscillatorModel::unit(), schedule, IndexLayout::EvenOnly);
  std::vector<CoefficientState> samples;
  const StateObserver obs[] = {[&](const CoefficientState& s) {
    if (s.time() >= schedule.end - 1e-12 && s.steps() % every == 0) samples.push_back(s);
  }};
  integrate(initial_state(policy), StepperConfig::until(1e-3, end), system, obs);
  return samples;
}

}  // namespace

TEST_CASE("norm examples") {
  CHECK(norm(initial_state(BasisPolicy::growing())) == 1.0);
  CoefficientState s(BasisPolicy::fixed(2), IndexLayout::EvenOnly, 2);
  s[0] = {0.6, 0.0};
  s[1] = {0.0, 0.8};
  CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("average_energy examples") {
  const OscillatorModel unit = OscillatorModel::unit();
  CHECK(average_energy(initial_state(BasisPolicy::growing()), unit) == 0.5);
  CoefficientState s(BasisPolicy::fixed(2), IndexLayout::EvenOnly, 2);
  s[1] = {1.0, 0.0};
  CHECK(average_energy(s, unit) == 2.5);
}

TEST_CASE("norm is the sum of the norms of disjoint slices") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  CoefficientState s(BasisPolicy::fixed(200), IndexLayout::Full, 200);
  for (std::size_t k = 0; k < 200; ++k) s[k] = {g(rng), g(rng)};
  CoefficientState even(BasisPolicy::fixed(200), IndexLayout::Full, 200);
  CoefficientState odd(BasisPolicy::fixed(200), IndexLayout::Full, 200);
  for (std::size_t k = 0; k < 200; ++k) (k % 2 == 0 ? even : odd)[k] = s[k];
  CHECK(norm(s) == doctest::Approx(norm(even) + norm(odd)).epsilon(1e-15));
}

TEST_CASE("average energy is bounded below by the ground energy") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(-30.0, 30.0);
  const OscillatorModel model(1.3, 0.7, 0.9);
  const double e0 = model.eigenenergy(0);
  for (int trial = 0; trial < 200; ++trial) {
    CoefficientState s(BasisPolicy::fixed(64), trial % 2 ? IndexLayout::Full : IndexLayout::EvenOnly, 64);
    const double mag = std::pow(10.0, scale(rng));
    for (std::size_t k = 0; k < 64; ++k) s[k] = mag * std::pow(0.5, static_cast<double>(k)) * cplx(g(rng), g(rng));
    const double n = norm(s);
    CHECK(average_energy(s, model) >= e0 * n * (1.0 - 1e-12));
  }
}

TEST_CASE("make_record") {
  CoefficientState s(BasisPolicy::growing(), IndexLayout::EvenOnly, 4);
  s[0] = {0.8, 0.0};
  s[2] = {0.0, 0.6};
  s.set_time(0.25);
  const DiagnosticsRecord r = make_record(s, OscillatorModel::unit());
  CHECK(r.time == 0.25);
  CHECK(r.basis_size == 4);
  CHECK(r.max_index == 4);
  CHECK(r.frontier_magnitude == 0.0);
  CHECK(r.norm == doctest::Approx(1.0));
  CHECK(r.energy == doctest::Approx(0.64 * 0.5 + 0.36 * 4.5));
}

TEST_CASE("recorder cadence") {
  DiagnosticsRecorder recorder(OscillatorModel::unit(), 10);
  CoupledSystem system(OscillatorModel::unit(), kRamp, IndexLayout::EvenOnly);
  const StateObserver obs[] = {[&](const CoefficientState& s) { recorder.observe(s); }};
  integrate(initial_state(BasisPolicy::fixed(16)), StepperConfig::until(1e-3, 0.1), system, obs);
  REQUIRE(recorder.records().size() == 11);
  CHECK(recorder.records()[3].time == doctest::Approx(0.03));
}

TEST_CASE("detect_breakdown") {
  const auto series = series_of({{0.0, 1.0}, {1.0, 1.02}, {2.0, 1.2}, {3.0, 50.0}});
  const BreakdownReport r = detect_breakdown(series, 0.1);
  REQUIRE(r.detected());
  CHECK(*r.time == 2.0);
  CHECK(r.within_one_period);
  CHECK(r.period == doctest::Approx(6.2831853));
  CHECK_FALSE(detect_breakdown(series, 1e6).detected());
  CHECK(*detect_breakdown(series_of({{0.0, 1.0}, {1.0, std::nan("")}})).time == 1.0);
  CHECK(*detect_breakdown(series_of({{0.0, 1.0}, {7.0, 0.5}})).time == 7.0);
  CHECK_FALSE(detect_breakdown(series_of({{0.0, 1.0}, {7.0, 0.5}})).within_one_period);
  CHECK_THROWS_AS(detect_breakdown(std::vector<DiagnosticsRecord>{}), std::invalid_argument);
}

TEST_CASE("breakdown time is monotone in the threshold") {
  std::mt19937 rng(2);
  std::lognormal_distribution<double> g(0.0, 0.5);
  std::vector<DiagnosticsRecord> series;
  for (int i = 0; i < 200; ++i) series.push_back({0.01 * i, g(rng), 0.5, 1, 0, 0.0});
  double previous = -1.0;
  for (double threshold : {3.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 1e-3}) {
    const BreakdownReport r = detect_breakdown(series, threshold);
    const double t = r.detected() ? *r.time : 1e300;
    if (previous >= 0.0) CHECK(t <= previous);
    previous = t;
  }
}

TEST_CASE("fixed truncation shows no breakdown on the ramp") {
  CoupledSystem system(OscillatorModel::unit(), kRamp, IndexLayout::EvenOnly);
  DiagnosticsRecorder recorder(OscillatorModel::unit(), 10);
  const StateObserver obs[] = {[&](const CoefficientState& s) { recorder.observe(s); }};
  integrate(initial_state(BasisPolicy::fixed(512)), StepperConfig::until(1e-3, 3.0), system, obs);
  CHECK_FALSE(detect_breakdown(recorder.records(), 0.1).detected());
}

TEST_CASE("growing run breaks down within one period") {
  CoupledSystem system(OscillatorModel::unit(), kRamp, IndexLayout::EvenOnly);
  DiagnosticsRecorder recorder(OscillatorModel::unit());
  const StateObserver obs[] = {[&](const CoefficientState& s) { recorder.observe(s); }};
  integrate(initial_state(BasisPolicy::growing()), StepperConfig::until(1e-3, 3.2), system, obs);
  const BreakdownReport r = detect_breakdown(recorder.records(), 0.1);
  REQUIRE(r.detected());
  CHECK(*r.time < 6.28);
  CHECK(r.within_one_period);
  double peak = 0.0;
  for (const auto& rec : recorder.records()) {
    if (rec.time < 3.0) peak = std::max(peak, rec.norm);
  }
  CHECK(peak > 100.0);
}

TEST_CASE("population_drift") {
  const std::vector<std::vector<double>> p{{0.5, 0.25}, {0.4, 0.3}, {0.45, 0.2}};
  const auto d = population_drift(p);
  CHECK(d[0] == doctest::Approx(0.1));
  CHECK(d[1] == doctest::Approx(0.1));
}

TEST_CASE("stationarity of the fixed truncation after the ramp") {
  const auto samples = post_ramp_samples(BasisPolicy::fixed(512), kRamp, 3.0, 100);
  REQUIRE(samples.size() == 21);
  const StationarityReport r = stationarity_probe(samples, kRamp, OscillatorModel::unit());
  CHECK(r.max_drift < 1e-4);
  CHECK(r.n_max >= 2);
  double total = 0.0;
  for (double p : r.populations.front()) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("zero ramp leaves populations fixed") {
  const RampSchedule flat{0.0, 1.0};
  const auto samples = post_ramp_samples(BasisPolicy::fixed(32), flat, 2.0, 100);
  const StationarityReport r = stationarity_probe(samples, flat, OscillatorModel::unit());
  CHECK(r.max_drift < 1e-14);
}

TEST_CASE("growing run keeps its low modes settled while the frontier diverges") {
  const auto samples = post_ramp_samples(BasisPolicy::growing(), kRamp, 3.2, 10);
  REQUIRE(samples.size() > 2);
  const StationarityReport r = stationarity_probe(samples, kRamp, OscillatorModel::unit());
  CHECK(r.max_drift < 1e-6);
  CHECK(norm(samples.back()) > 100.0);
  const CoefficientState& last = samples.back();
  std::size_t dominant = 0;
  for (std::size_t k = 1; k < last.size(); ++k) {
    if (std::abs(last[k]) > std::abs(last[dominant])) dominant = k;
  }
  CHECK(last.index(dominant) > 1000);
}

TEST_CASE("stationarity_probe preconditions") {
  auto early = initial_state(BasisPolicy::fixed(8));
  early.set_time(0.5);
  const CoefficientState one[] = {early};
  CHECK_THROWS_AS(stationarity_probe(one, kRamp, OscillatorModel::unit()), std::invalid_argument);
  early.set_time(1.5);
  const CoefficientState late[] = {early};
  CHECK_THROWS_AS(stationarity_probe(late, RampSchedule{1.0, 1.0, RampVariant::RampDown}, OscillatorModel::unit()),
                  PolicyError);
}
