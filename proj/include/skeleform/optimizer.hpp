#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skeleform/mlp.hpp"

namespace skeleform {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments and step count; unused by SGD.
struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

void optimizer_step(std::span<double> params, OptimizerState& state, std::span<const double> grads,
                    const OptimizerConfig& config);

inline void optimizer_step(MlpModel& m, OptimizerState& state, std::span<const double> grads,
                           const OptimizerConfig& config) {
  optimizer_step(m.parameters(), state, grads, config);
}

}  // namespace skeleform
