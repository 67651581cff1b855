#include "skeleform/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skeleform/error.hpp"

namespace skeleform {

void validate(const TrainConfig& tc) {
  if (tc.batch_size == 0) throw Error(ErrorCode::invalid_argument, "batch_size must be positive");
  const OptimizerConfig& o = tc.optimizer;
  if (!(o.learning_rate > 0.0) || !std::isfinite(o.learning_rate))
    throw Error(ErrorCode::invalid_argument, "learning_rate must be positive");
  if (o.kind == OptimizerKind::adam &&
      (!(o.beta1 >= 0.0 && o.beta1 < 1.0) || !(o.beta2 >= 0.0 && o.beta2 < 1.0) || !(o.epsilon > 0.0)))
    throw Error(ErrorCode::invalid_argument, "Adam needs betas in [0, 1) and epsilon > 0");
  if (!(tc.scale_lo > 0.0) || !(tc.scale_lo <= tc.scale_hi) || !std::isfinite(tc.scale_hi))
    throw Error(ErrorCode::invalid_argument, "scale range must satisfy 0 < lo <= hi");
  if (!(tc.mask_prob >= 0.0 && tc.mask_prob <= 1.0))
    throw Error(ErrorCode::invalid_argument, "mask_prob must lie in [0, 1]");
}

LossTrend loss_trend(const std::vector<double>& history, double fraction) {
  if (history.empty()) return {};
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(history.size()) * fraction));
  const auto mean = [&](auto first, auto last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(std::distance(first, last));
  };
  return {mean(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(window)),
          mean(history.end() - static_cast<std::ptrdiff_t>(window), history.end())};
}

}  // namespace skeleform
