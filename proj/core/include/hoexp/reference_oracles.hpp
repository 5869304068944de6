#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoexp/hamiltonian_schedule.hpp"
#include "hoexp/oscillator_basis.hpp"

namespace hoexp {

/// Complex samples psi(x_i, t) on a uniform grid, x_i = -L + i dx.
struct GridWavefunction {
  GridSpec grid;
  std::vector<std::complex<double>> psi;
  double time = 0.0;

  /// sum |psi_i|^2 dx
  [[nodiscard]] double norm() const;
  /// max(|psi_0|, |psi_{M-1}|) / max_i |psi_i|
  [[nodiscard]] double boundary_ratio() const;
};

/// Default oracle grid: L = 16, M = 4096.
inline constexpr GridSpec kOracleGrid{16.0, 4096};

/// psi_n of `model` sampled on `grid`.
GridWavefunction eigenstate_on_grid(const OscillatorModel& model, std::size_t n, const GridSpec& grid = kOracleGrid);

/// Norm-preserving Crank-Nicolson propagation of
///   H(t) = -hbar^2/(2m) d^2/dx^2 + S(t) k x^2 / 2
/// with a fourth-order five-point Laplacian and homogeneous Dirichlet ends.
/// Each step evaluates H at the midpoint of the step.
class GridPropagator {
 public:
  GridPropagator(OscillatorModel model, RampSchedule schedule, GridSpec grid, double dt);

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }

  /// Advances by one dt. Throws DomainOverflowError if the boundary amplitude
  /// exceeds 1e-8 of the peak.
  void step(GridWavefunction& wave);

  /// Advances to t_end in whole steps, calling `observer` after each step.
  /// Throws std::invalid_argument unless t_end - t is a whole number of steps.
  void advance(GridWavefunction& wave, double t_end,
               const std::function<void(const GridWavefunction&)>& observer = {});

  /// <psi|H(t)|psi> / <psi|psi> with the discrete operator.
  [[nodiscard]] double energy(const GridWavefunction& wave, double t) const;

 private:
  void factorize(double spring_scale);
  void apply_hamiltonian(std::span<const std::complex<double>> in, double spring_scale,
                         std::span<std::complex<double>> out) const;

  OscillatorModel model_;
  RampSchedule schedule_;
  GridSpec grid_;
  double dt_;
  std::vector<double> potential_;  // k x^2 / 2
  double kinetic_[3] = {};         // stencil of -hbar^2/2m d^2/dx^2 at offsets 0, 1, 2
  double factored_scale_ = -1.0;
  std::vector<std::complex<double>> lu_;  // 5 bands per row, LU factors of I + i dt/(2 hbar) H
  std::vector<std::complex<double>> inv_diagonal_;
  std::vector<std::complex<double>> work_;
  std::uint64_t steps_since_check_ = 0;
};

/// Propagates `initial` to t_end. Throws std::invalid_argument when the initial
/// boundary amplitude exceeds 1e-10 of the peak.
GridWavefunction grid_propagate(const GridWavefunction& initial, const RampSchedule& schedule,
                                const OscillatorModel& model, double dt, double t_end);

/// Exact Gaussian solution for quadratic Hamiltonians starting from the ground state:
///   psi(x, t) = (m omega / pi hbar)^(1/4) eps^(-1/2) exp(i m (eps'/eps) x^2 / (2 hbar)),
///   eps'' + (k S(t) / m) eps = 0,  eps(0) = 1,  eps'(0) = i omega.
struct GaussianState {
  double time = 0.0;
  std::complex<double> eps{1.0, 0.0};
  std::complex<double> eps_dot{0.0, 1.0};
  /// Continuous branch of arg(eps).
  double phase = 0.0;
  /// Richardson estimate of the error in (eps, eps').
  double error_estimate = 0.0;

  /// Im(conj(eps) eps'); equals omega for all t.
  [[nodiscard]] double wronskian() const { return (std::conj(eps) * eps_dot).imag(); }
  [[nodiscard]] std::complex<double> wavefunction(const OscillatorModel& model, double x) const;
};

/// Evolves the classical equation with RK4 at `dt` and at 2 dt for the Richardson check.
/// Throws RangeError if eps blows up numerically.
std::vector<GaussianState> gaussian_trajectory(const RampSchedule& schedule, const OscillatorModel& model,
                                               std::span<const double> times, double dt = 1e-5);
GaussianState gaussian_evolve(const RampSchedule& schedule, double t,
                              const OscillatorModel& model = OscillatorModel::unit(), double dt = 1e-5);

GridWavefunction gaussian_on_grid(const GaussianState& state, const OscillatorModel& model,
                                  const GridSpec& grid = kOracleGrid);

struct Projection {
  /// D_n = integral psi_n(x) psi(x, t) dx for n = 0..n_max.
  std::vector<std::complex<double>> amplitudes;
  /// 1 - sum |D_n|^2 relative to the wavefunction norm.
  double completeness_defect = 0.0;
  /// Set when the completeness defect exceeds 1e-6.
  bool incomplete = false;

  [[nodiscard]] std::vector<double> populations() const;
};

/// Projects grid wavefunctions onto psi_0..psi_{n_max} of one oscillator,
/// caching the sampled basis.
class BasisProjector {
 public:
  /// Throws std::invalid_argument if psi_{n_max} is not resolved by the grid spacing.
  BasisProjector(const OscillatorModel& model, std::size_t n_max, const GridSpec& grid = kOracleGrid);

  [[nodiscard]] Projection project(const GridWavefunction& wave) const;
  [[nodiscard]] std::size_t n_max() const noexcept { return n_max_; }

 private:
  GridSpec grid_;
  std::size_t n_max_;
  Eigen::MatrixXd basis_;
};

Projection project_onto_basis(const GridWavefunction& wave, const OscillatorModel& model, std::size_t n_max);
Projection project_onto_basis(const GaussianState& state, const OscillatorModel& model, std::size_t n_max,
                              const OscillatorModel& state_model = OscillatorModel::unit(),
                              const GridSpec& grid = kOracleGrid);

/// Rotates so the largest-magnitude sample is real positive.
std::vector<std::complex<double>> phase_aligned(std::span<const std::complex<double>> psi);

/// max_i |a_i - b_i| after phase alignment of both.
double aligned_max_difference(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace hoexp
