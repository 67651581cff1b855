#pragma once

#include <cstdint>
#include <vector>

#include "skeleform/mlp.hpp"
#include "skeleform/optimizer.hpp"

namespace skeleform {

struct TrainConfig {
  std::size_t iterations = 4000;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer{};  // Adam(0.9, 0.999, 1e-8), lr 1e-3
  double scale_lo = 0.5;        // per-group factor range for factor training
  double scale_hi = 2.0;
  double mask_prob = 0.2;  // per-joint masking probability for completion training
  std::uint64_t seed = 0;
};

/// Throws Error(invalid_argument) on a zero batch, a non-positive learning
/// rate, 0 < lo <= hi violated, or mask_prob outside [0, 1].
void validate(const TrainConfig& tc);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // mean batch loss per iteration
};

/// Mean of the first and last `fraction` of a loss history.
struct LossTrend {
  double initial = 0.0;
  double final = 0.0;
};
LossTrend loss_trend(const std::vector<double>& history, double fraction = 0.1);

}  // namespace skeleform
