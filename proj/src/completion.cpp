#include "skeleform/completion.hpp"

#include <cmath>

#include "skeleform/error.hpp"
#include "skeleform/factor_model.hpp"
#include "skeleform/kernels.hpp"
#include "skeleform/kinematics.hpp"

namespace skeleform {
namespace {

constexpr std::size_t kCoordinateCount = 2 * kNumJoints;

void check_model(const MlpModel& m) {
  if (m.input_size() != kPoseEncodingSize || m.output_size() != kCoordinateCount)
    throw Error(ErrorCode::shape, "completion model must map 54 inputs to 36 outputs");
}

}  // namespace

MlpConfig default_completion_config(std::uint64_t seed) {
  return {{kPoseEncodingSize, 256, 256, 256, 256, kCoordinateCount}, Activation::relu, seed};
}

KeypointSet mask_pose(const KeypointSet& k, double p, Rng& rng) {
  KeypointSet out = k;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    const bool hide = rng.bernoulli(p);
    if (i == kNeck || !hide) continue;
    out.visible[i] = false;
    out.points[i] = {};
  }
  return out;
}

double completion_loss(std::span<const double> prediction, std::span<const double> target,
                       const std::array<bool, kNumJoints>& observed, std::span<double> grad_prediction) {
  if (prediction.size() != kCoordinateCount || target.size() != kCoordinateCount ||
      grad_prediction.size() != kCoordinateCount)
    throw Error(ErrorCode::shape, "completion loss expects 36 coordinates");
  std::size_t masked = 0;
  for (bool o : observed) masked += o ? 0 : 1;
  for (double& g : grad_prediction) g = 0.0;
  if (masked == 0) return 0.0;

  const double inv = 1.0 / static_cast<double>(2 * masked);
  double loss = 0.0;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (observed[i]) continue;
    for (std::size_t d = 2 * i; d < 2 * i + 2; ++d) {
      const double diff = prediction[d] - target[d];
      loss += std::abs(diff);
      grad_prediction[d] = diff > 0.0 ? inv : (diff < 0.0 ? -inv : 0.0);
    }
  }
  return loss * inv;
}

TrainResult train_completion_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc,
                                   const MlpConfig& mc) {
  return train_completion_model(dataset, tc, mlp_init(mc, ModelKind::completion));
}

TrainResult train_completion_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc,
                                   MlpModel initial) {
  validate(tc);
  check_model(initial);
  std::vector<const KeypointSet*> poses;
  for (const KeypointSet& k : dataset)
    if (k.fully_visible()) poses.push_back(&k);
  if (poses.empty()) throw Error(ErrorCode::empty_dataset, "completion training needs fully visible poses");

  TrainResult result{std::move(initial), {}};
  result.model.set_kind(ModelKind::completion);
  result.loss_history.reserve(tc.iterations);

  Rng rng(tc.seed);
  OptimizerState state;
  kernels::BatchGradient kernel;
  std::vector<std::vector<double>> inputs(tc.batch_size);
  std::vector<std::vector<double>> targets(tc.batch_size, std::vector<double>(kCoordinateCount));
  std::vector<std::array<bool, kNumJoints>> observed(tc.batch_size);
  std::vector<double> grad;

  const kernels::LossHead head = [&](std::size_t b, std::span<const double> out, std::span<double> g) {
    return completion_loss(out, targets[b], observed[b], g);
  };

  for (std::size_t it = 0; it < tc.iterations; ++it) {
    for (std::size_t b = 0; b < tc.batch_size; ++b) {
      const KeypointSet& truth = *poses[rng.index(poses.size())];
      const KeypointSet masked = mask_pose(truth, tc.mask_prob, rng);
      const Normalization n = normalize(masked);
      inputs[b] = encode_factor_input(masked);
      observed[b] = masked.visible;
      for (std::size_t i = 0; i < kNumJoints; ++i) {
        const Vec2 t = (1.0 / n.scale) * (truth.points[i] - n.offset);
        targets[b][2 * i] = t.x;
        targets[b][2 * i + 1] = t.y;
      }
    }
    result.loss_history.push_back(kernel.run_parallel(result.model, inputs, head, grad));
    optimizer_step(result.model, state, grad, tc.optimizer);
  }
  return result;
}

KeypointSet complete_pose(const MlpModel& m, const KeypointSet& k) {
  check_model(m);
  if (!k.visible[kNeck]) throw Error(ErrorCode::missing_joint, "pose completion needs a visible neck", "neck");
  if (k.fully_visible()) return k;

  const Normalization n = normalize(k);
  const std::vector<double> pred = mlp_predict(m, encode_factor_input(k));
  KeypointSet out = k;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (k.visible[i]) continue;
    out.points[i] = n.scale * Vec2{pred[2 * i], pred[2 * i + 1]} + n.offset;
    out.visible[i] = true;
  }
  return out;
}

}  // namespace skeleform
