#include "hoexp/reference_oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hoexp/errors.hpp"
#include "hoexp/rk4_integrator.hpp"
#include "hoexp/summation.hpp"

namespace hoexp {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kBands = 5;
constexpr std::uint64_t kDomainCheckInterval = 10;

std::uint64_t whole_steps(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (span < -1e-12) throw std::invalid_argument("cannot propagate backwards in time");
  const double count = std::round(span / dt);
  if (std::abs(count * dt - span) > 1e-9 * std::max(1.0, std::abs(span))) {
    std::ostringstream msg;
    msg << "interval " << span << " is not a whole number of steps of " << dt;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<std::uint64_t>(std::max(0.0, count));
}

}  // namespace

double GridWavefunction::norm() const {
  CompensatedSum sum;
  for (const auto& v : psi) sum += std::norm(v);
  return sum.value() * grid.spacing();
}

double GridWavefunction::boundary_ratio() const {
  if (psi.empty()) return 0.0;
  double peak = 0.0;
  for (const auto& v : psi) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(psi.front()), std::abs(psi.back())) / peak;
}

GridWavefunction eigenstate_on_grid(const OscillatorModel& model, std::size_t n, const GridSpec& grid) {
  GridWavefunction wave;
  wave.grid = grid;
  wave.psi.resize(grid.points);
  std::vector<double> table(n + 1);
  for (std::size_t i = 0; i < grid.points; ++i) {
    eigenfunction_table(model, grid.x(i), table);
    wave.psi[i] = table[n];
  }
  return wave;
}

GridPropagator::GridPropagator(OscillatorModel model, RampSchedule schedule, GridSpec grid, double dt)
    : model_(model), schedule_(schedule), grid_(grid), dt_(dt) {
  schedule_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (grid.points < 5) throw std::invalid_argument("grid needs at least five points");
  const double dx = grid_.spacing();
  const double c = model_.hbar() * model_.hbar() / (2.0 * model_.mass() * dx * dx);
  // -c * (-1/12, 4/3, -5/2, 4/3, -1/12)
  kinetic_[0] = 2.5 * c;
  kinetic_[1] = -4.0 / 3.0 * c;
  kinetic_[2] = c / 12.0;
  potential_.resize(grid_.points);
  for (std::size_t i = 0; i < grid_.points; ++i) {
    const double x = grid_.x(i);
    potential_[i] = 0.5 * model_.spring() * x * x;
  }
  lu_.resize(kBands * grid_.points);
  inv_diagonal_.resize(grid_.points);
  work_.resize(grid_.points);
}

void GridPropagator::apply_hamiltonian(std::span<const cplx> in, double spring_scale, std::span<cplx> out) const {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = (kinetic_[0] + spring_scale * potential_[i]) * in[i];
    if (i >= 1) acc += kinetic_[1] * in[i - 1];
    if (i + 1 < n) acc += kinetic_[1] * in[i + 1];
    if (i >= 2) acc += kinetic_[2] * in[i - 2];
    if (i + 2 < n) acc += kinetic_[2] * in[i + 2];
    out[i] = acc;
  }
}

void GridPropagator::factorize(double spring_scale) {
  const std::size_t n = grid_.points;
  const cplx tau{0.0, dt_ / (2.0 * model_.hbar())};
  auto at = [this](std::size_t row, std::size_t col) -> cplx& { return lu_[kBands * row + (col + 2 - row)]; };
  std::fill(lu_.begin(), lu_.end(), cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    at(i, i) = 1.0 + tau * (kinetic_[0] + spring_scale * potential_[i]);
    if (i >= 1) at(i, i - 1) = tau * kinetic_[1];
    if (i + 1 < n) at(i, i + 1) = tau * kinetic_[1];
    if (i >= 2) at(i, i - 2) = tau * kinetic_[2];
    if (i + 2 < n) at(i, i + 2) = tau * kinetic_[2];
  }
  // Banded Doolittle without pivoting; I + i tau H has a nonzero real unit diagonal shift.
  for (std::size_t i = 0; i < n; ++i) {
    const cplx inv_pivot = 1.0 / at(i, i);
    inv_diagonal_[i] = inv_pivot;
    for (std::size_t j = i + 1; j <= std::min(i + 2, n - 1); ++j) {
      const cplx l = at(j, i) * inv_pivot;
      at(j, i) = l;
      for (std::size_t k = i + 1; k <= std::min(i + 2, n - 1); ++k) at(j, k) -= l * at(i, k);
    }
  }
  factored_scale_ = spring_scale;
}

void GridPropagator::step(GridWavefunction& wave) {
  const std::size_t n = grid_.points;
  if (wave.psi.size() != n) throw std::invalid_argument("wavefunction does not match the propagator grid");
  const double scale = schedule_.spring_scale(wave.time + 0.5 * dt_);
  if (scale != factored_scale_) factorize(scale);

  const cplx tau{0.0, dt_ / (2.0 * model_.hbar())};
  apply_hamiltonian(wave.psi, scale, work_);
  for (std::size_t i = 0; i < n; ++i) work_[i] = wave.psi[i] - tau * work_[i];

  auto at = [this](std::size_t row, std::size_t col) -> const cplx& {
    return lu_[kBands * row + (col + 2 - row)];
  };
  for (std::size_t j = 1; j < n; ++j) {
    cplx acc = work_[j] - at(j, j - 1) * work_[j - 1];
    if (j >= 2) acc -= at(j, j - 2) * work_[j - 2];
    work_[j] = acc;
  }
  for (std::size_t j = n; j-- > 0;) {
    cplx acc = work_[j];
    if (j + 1 < n) acc -= at(j, j + 1) * wave.psi[j + 1];
    if (j + 2 < n) acc -= at(j, j + 2) * wave.psi[j + 2];
    wave.psi[j] = acc * inv_diagonal_[j];
  }
  wave.time += dt_;

  if (++steps_since_check_ >= kDomainCheckInterval) {
    steps_since_check_ = 0;
    const double ratio = wave.boundary_ratio();
    if (!(ratio <= 1e-8)) {
      std::ostringstream msg;
      msg << "grid wavefunction reached the boundary (ratio " << ratio << ") at t = " << wave.time;
      throw DomainOverflowError(msg.str());
    }
  }
}

void GridPropagator::advance(GridWavefunction& wave, double t_end,
                             const std::function<void(const GridWavefunction&)>& observer) {
  const double t0 = wave.time;
  const std::uint64_t count = whole_steps(t_end - t0, dt_);
  for (std::uint64_t j = 1; j <= count; ++j) {
    step(wave);
    wave.time = t0 + static_cast<double>(j) * dt_;
    if (observer) observer(wave);
  }
}

double GridPropagator::energy(const GridWavefunction& wave, double t) const {
  std::vector<cplx> h_psi(wave.psi.size());
  apply_hamiltonian(wave.psi, schedule_.spring_scale(t), h_psi);
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < wave.psi.size(); ++i) {
    num += (std::conj(wave.psi[i]) * h_psi[i]).real();
    den += std::norm(wave.psi[i]);
  }
  return num.value() / den.value();
}

GridWavefunction grid_propagate(const GridWavefunction& initial, const RampSchedule& schedule,
                                const OscillatorModel& model, double dt, double t_end) {
  if (!(initial.boundary_ratio() <= 1e-10)) {
    throw std::invalid_argument("initial wavefunction is not contained in the grid");
  }
  GridPropagator propagator(model, schedule, initial.grid, dt);
  GridWavefunction wave = initial;
  propagator.advance(wave, t_end);
  return wave;
}

std::complex<double> GaussianState::wavefunction(const OscillatorModel& model, double x) const {
  const double prefactor =
      std::sqrt(std::sqrt(model.mass() * model.omega() / (std::numbers::pi * model.hbar())));
  const cplx inv_sqrt_eps = std::polar(1.0 / std::sqrt(std::abs(eps)), -0.5 * phase);
  const cplx exponent = cplx{0.0, 1.0} * model.mass() * (eps_dot / eps) * x * x / (2.0 * model.hbar());
  return prefactor * inv_sqrt_eps * std::exp(exponent);
}

namespace {

struct ClassicalSample {
  std::array<double, 4> y{};
  double phase = 0.0;
};

void unwrap(double& phase, const std::array<double, 4>& y) {
  const double arg = std::atan2(y[1], y[0]);
  phase += std::remainder(arg - phase, 2.0 * std::numbers::pi);
}

std::vector<ClassicalSample> classical_pass(const RampSchedule& schedule, const OscillatorModel& model,
                                            std::span<const double> times, double h) {
  const double inv_mass = 1.0 / model.mass();
  auto field = [&](double t, std::span<const double> y, std::span<double> dy) {
    const double w2 = model.spring() * schedule.spring_scale(t) * inv_mass;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -w2 * y[0];
    dy[3] = -w2 * y[1];
  };

  Rk4Stepper stepper;
  std::array<double, 4> y{1.0, 0.0, 0.0, model.omega()};
  double phase = 0.0;
  std::uint64_t j = 0;
  std::vector<ClassicalSample> out;
  out.reserve(times.size());
  for (double target : times) {
    const auto whole = static_cast<std::uint64_t>(std::floor(target / h + 1e-9));
    while (j < whole) {
      stepper.step(field, static_cast<double>(j) * h, y, h);
      ++j;
      unwrap(phase, y);
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::hypot(y[0], y[1]) > 1e150) {
        throw RangeError("classical width equation blew up at t = " + std::to_string(static_cast<double>(j) * h));
      }
    }
    ClassicalSample sample{y, phase};
    const double rest = target - static_cast<double>(j) * h;
    if (rest > 1e-14) {
      stepper.step(field, static_cast<double>(j) * h, sample.y, rest);
      unwrap(sample.phase, sample.y);
    }
    out.push_back(sample);
  }
  return out;
}

}  // namespace

std::vector<GaussianState> gaussian_trajectory(const RampSchedule& schedule, const OscillatorModel& model,
                                               std::span<const double> times, double dt) {
  schedule.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("sample times must be non-negative and ascending");
    }
  }
  const auto fine = classical_pass(schedule, model, times, dt);
  const auto coarse = classical_pass(schedule, model, times, 2.0 * dt);

  std::vector<GaussianState> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& y = fine[i].y;
    GaussianState s;
    s.time = times[i];
    s.eps = {y[0], y[1]};
    s.eps_dot = {y[2], y[3]};
    s.phase = fine[i].phase;
    double diff = 0.0;
    for (std::size_t c = 0; c < 4; ++c) diff = std::max(diff, std::abs(y[c] - coarse[i].y[c]));
    s.error_estimate = diff / 15.0;
    out.push_back(s);
  }
  return out;
}

GaussianState gaussian_evolve(const RampSchedule& schedule, double t, const OscillatorModel& model, double dt) {
  const double times[] = {t};
  return gaussian_trajectory(schedule, model, times, dt).front();
}

GridWavefunction gaussian_on_grid(const GaussianState& state, const OscillatorModel& model, const GridSpec& grid) {
  GridWavefunction wave;
  wave.grid = grid;
  wave.time = state.time;
  wave.psi.resize(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) wave.psi[i] = state.wavefunction(model, grid.x(i));
  return wave;
}

std::vector<double> Projection::populations() const {
  std::vector<double> out(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), out.begin(), [](const cplx& a) { return std::norm(a); });
  return out;
}

BasisProjector::BasisProjector(const OscillatorModel& model, std::size_t n_max, const GridSpec& grid)
    : grid_(grid), n_max_(n_max) {
  const double k_max = model.alpha() * std::sqrt(2.0 * static_cast<double>(n_max) + 1.0);
  if (k_max > std::numbers::pi / (4.0 * grid.spacing())) {
    throw std::invalid_argument("grid spacing does not resolve psi_" + std::to_string(n_max));
  }
  basis_ = sample_basis(model, n_max, grid);
}

Projection BasisProjector::project(const GridWavefunction& wave) const {
  if (wave.psi.size() != grid_.points || wave.grid.half_width != grid_.half_width) {
    throw std::invalid_argument("wavefunction grid does not match the projector grid");
  }
  const auto rows = static_cast<Eigen::Index>(wave.psi.size());
  Eigen::VectorXd re(rows);
  Eigen::VectorXd im(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    re(i) = wave.psi[static_cast<std::size_t>(i)].real();
    im(i) = wave.psi[static_cast<std::size_t>(i)].imag();
  }
  const double dx = grid_.spacing();
  const Eigen::VectorXd pr = basis_.transpose() * re * dx;
  const Eigen::VectorXd pi = basis_.transpose() * im * dx;

  Projection out;
  out.amplitudes.resize(n_max_ + 1);
  CompensatedSum captured;
  for (std::size_t n = 0; n <= n_max_; ++n) {
    out.amplitudes[n] = {pr(static_cast<Eigen::Index>(n)), pi(static_cast<Eigen::Index>(n))};
    captured += std::norm(out.amplitudes[n]);
  }
  out.completeness_defect = 1.0 - captured.value() / wave.norm();
  out.incomplete = out.completeness_defect > 1e-6;
  return out;
}

Projection project_onto_basis(const GridWavefunction& wave, const OscillatorModel& model, std::size_t n_max) {
  return BasisProjector(model, n_max, wave.grid).project(wave);
}

Projection project_onto_basis(const GaussianState& state, const OscillatorModel& model, std::size_t n_max,
                              const OscillatorModel& state_model, const GridSpec& grid) {
  return project_onto_basis(gaussian_on_grid(state, state_model, grid), model, n_max);
}

std::vector<std::complex<double>> phase_aligned(std::span<const std::complex<double>> psi) {
  std::vector<cplx> out(psi.begin(), psi.end());
  if (out.empty()) return out;
  const auto peak = std::max_element(out.begin(), out.end(),
                                     [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  if (std::abs(*peak) == 0.0) return out;
  const cplx rotation = std::conj(*peak) / std::abs(*peak);
  for (auto& v : out) v *= rotation;
  return out;
}

double aligned_max_difference(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wavefunctions differ in length");
  const auto aa = phase_aligned(a);
  const auto bb = phase_aligned(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < aa.size(); ++i) worst = std::max(worst, std::abs(aa[i] - bb[i]));
  return worst;
}

}  // namespace hoexp
