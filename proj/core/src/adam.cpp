#include "sidnism/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sidnism::ad {

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  if (state.step == 0 && state.first_moment.empty()) {
    for (const Parameter* p : params) {
      state.first_moment.emplace_back(p->value.size(), 0.0);
      state.second_moment.emplace_back(p->value.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter count changed between steps");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Parameter& p = *params[k];
    if (p.grad.size() != p.value.size() || state.first_moment[k].size() != p.value.size()) {
      throw std::invalid_argument("adam_step: shape mismatch for parameter " + std::to_string(k));
    }
  }

  const AdamOptions& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
    }
  }
}

}  // namespace sidnism::ad
