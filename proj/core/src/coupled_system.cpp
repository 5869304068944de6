#include "hoexp/coupled_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hoexp/errors.hpp"

namespace hoexp {

std::string_view to_string(IndexLayout layout) {
  return layout == IndexLayout::EvenOnly ? "even" : "full";
}

CoefficientState::CoefficientState(BasisPolicy policy, IndexLayout layout, std::size_t slots)
    : policy_(policy), layout_(layout), amplitudes_(slots) {}

std::span<double> CoefficientState::components() noexcept {
  // std::complex<T> is layout-compatible with T[2].
  return {reinterpret_cast<double*>(amplitudes_.data()), 2 * amplitudes_.size()};
}

std::span<const double> CoefficientState::components() const noexcept {
  return {reinterpret_cast<const double*>(amplitudes_.data()), 2 * amplitudes_.size()};
}

bool CoefficientState::finite() const noexcept {
  const auto c = components();
  return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
}

CoefficientState initial_state(BasisPolicy policy, IndexLayout layout) {
  const std::size_t slots = policy.kind == BasisPolicy::Kind::Growing ? 1 : policy.fixed_slots;
  if (slots == 0) throw std::invalid_argument("fixed truncation needs at least one slot");
  CoefficientState state(policy, layout, slots);
  state[0] = {1.0, 0.0};
  return state;
}

CoupledSystem::CoupledSystem(OscillatorModel model, RampSchedule schedule, IndexLayout layout)
    : model_(model), schedule_(schedule), layout_(layout), neighbour_(layout == IndexLayout::EvenOnly ? 1 : 2) {
  schedule_.validate();
}

void CoupledSystem::reserve(std::size_t slots) {
  const std::size_t stride = layout_ == IndexLayout::EvenOnly ? 2 : 1;
  const double scale = model_.spring() / model_.hbar();
  for (std::size_t k = diagonal_.size(); k < slots; ++k) {
    const std::size_t n = stride * k;
    diagonal_.push_back(scale * x2_half_matrix_element(model_, n, n));
    upper_.push_back(scale * x2_half_matrix_element(model_, n, n + 2));
  }
}

double CoupledSystem::diagonal(std::size_t slot) const noexcept {
  if (slot < diagonal_.size()) return diagonal_[slot];
  const std::size_t n = (layout_ == IndexLayout::EvenOnly ? 2 : 1) * slot;
  return model_.spring() / model_.hbar() * x2_half_matrix_element(model_, n, n);
}

double CoupledSystem::upper(std::size_t slot) const noexcept {
  if (slot < upper_.size()) return upper_[slot];
  const std::size_t n = (layout_ == IndexLayout::EvenOnly ? 2 : 1) * slot;
  return model_.spring() / model_.hbar() * x2_half_matrix_element(model_, n, n + 2);
}

void CoupledSystem::evaluate(double t, std::span<const double> y, std::span<double> dy) const {
  if (y.size() != dy.size() || y.size() % 2 != 0) {
    throw std::invalid_argument("coefficient vectors must be interleaved and of equal length");
  }
  const std::size_t slots = y.size() / 2;
  const double s = schedule_.scalar_factor(t);
  if (s == 0.0) {
    std::fill(dy.begin(), dy.end(), 0.0);
    return;
  }
  const double phase = 2.0 * model_.omega() * t;
  const double c = std::cos(phase);
  const double sn = std::sin(phase);
  const std::size_t d = neighbour_;

  for (std::size_t k = 0; k < slots; ++k) {
    const double re = y[2 * k];
    const double im = y[2 * k + 1];
    const double v_diag = s * diagonal(k);
    double acc_r = im * v_diag;
    double acc_i = re * v_diag;
    if (k >= d) {
      const double v_low = s * upper(k - d);
      const double re_l = y[2 * (k - d)];
      const double im_l = y[2 * (k - d) + 1];
      acc_r += (im_l * c + re_l * sn) * v_low;
      acc_i += (re_l * c - im_l * sn) * v_low;
    }
    if (k + d < slots) {
      const double v_up = s * upper(k);
      const double re_u = y[2 * (k + d)];
      const double im_u = y[2 * (k + d) + 1];
      acc_r += (im_u * c - re_u * sn) * v_up;
      acc_i += (re_u * c + im_u * sn) * v_up;
    }
    dy[2 * k] = acc_r;
    dy[2 * k + 1] = -acc_i;
  }
}

RhsEvaluation rhs(const CoefficientState& state, const RampSchedule& schedule, const OscillatorModel& model,
                  double t) {
  if (!state.finite()) throw NonFiniteError("non-finite coefficient in rhs input");
  CoefficientState support = state;
  if (state.policy().kind == BasisPolicy::Kind::Growing) support.append_slot();
  CoupledSystem system(model, schedule, state.layout());
  system.reserve(support.size());
  RhsEvaluation out;
  out.time = t;
  out.derivative.resize(support.size());
  std::span<double> dy{reinterpret_cast<double*>(out.derivative.data()), 2 * out.derivative.size()};
  system.evaluate(t, support.components(), dy);
  return out;
}

CoefficientState grow_frontier(const CoefficientState& state) {
  if (state.policy().kind != BasisPolicy::Kind::Growing) {
    throw PolicyError("grow_frontier requires the growing basis policy");
  }
  CoefficientState grown = state;
  grown.append_slot();
  return grown;
}

std::size_t stage_variable_count(const CoefficientState& state) {
  return 2 + 8 * (state.size() - 1);
}

std::vector<ModeAmplitude> to_complex_amplitudes(const CoefficientState& state, const OscillatorModel& model) {
  std::vector<ModeAmplitude> out;
  out.reserve(state.size());
  const double t = state.time();
  for (std::size_t k = 0; k < state.size(); ++k) {
    const std::size_t n = state.index(k);
    const double angle = -model.eigenenergy(n) * t / model.hbar();
    out.push_back({n, state[k] * std::polar(1.0, angle)});
  }
  return out;
}

}  // namespace hoexp
