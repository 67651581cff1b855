#include "skeleform/optimizer.hpp"

#include <cmath>

#include "skeleform/error.hpp"

namespace skeleform {

void optimizer_step(std::span<double> params, OptimizerState& state, std::span<const double> grads,
                    const OptimizerConfig& config) {
  if (grads.size() != params.size())
    throw Error(ErrorCode::shape, "gradient has " + std::to_string(grads.size()) + " entries for " +
                                      std::to_string(params.size()) + " parameters");
  const double lr = config.learning_rate;

  if (config.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
    ++state.step;
    return;
  }

  if (state.first_moment.empty() && state.second_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw Error(ErrorCode::shape, "optimizer state does not match the parameter count");

  ++state.step;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace skeleform
