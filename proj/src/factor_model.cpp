#include "skeleform/factor_model.hpp"

#include <algorithm>
#include <cmath>

#include "skeleform/error.hpp"
#include "skeleform/kernels.hpp"
#include "skeleform/kinematics.hpp"

namespace skeleform {
namespace {

// Raw outputs are clamped before exponentiation so factors stay finite.
constexpr double kRawLimit = 30.0;

struct PreparedPose {
  PolarPose polar;
  double mean_length = 1.0;
};

std::vector<PreparedPose> prepare(const std::vector<KeypointSet>& dataset, const Topology& topo) {
  std::vector<PreparedPose> out;
  for (const KeypointSet& k : dataset) {
    if (!k.fully_visible()) continue;
    PreparedPose p{to_polar(k, topo), 0.0};
    double total = 0.0;
    for (std::size_t i = 0; i < kNumJoints; ++i)
      if (!topo.is_root(i)) total += p.polar.entries[i].length;
    p.mean_length = total / static_cast<double>(kNumJoints - 1);
    if (p.mean_length > 0.0 && std::isfinite(p.mean_length)) out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::empty_dataset, "no fully visible, non-degenerate poses to train on");
  return out;
}

}  // namespace

std::vector<double> encode_factor_input(const KeypointSet& k) {
  std::vector<double> out(kPoseEncodingSize, 0.0);
  if (!k.visible[kNeck]) {
    // Nothing can be centred; only visibility bits are informative.
    for (std::size_t i = 0; i < kNumJoints; ++i) out[2 * kNumJoints + i] = k.visible[i] ? 1.0 : 0.0;
    return out;
  }
  const Normalization n = normalize(k);
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (n.pose.visible[i]) {
      out[2 * i] = n.pose.points[i].x;
      out[2 * i + 1] = n.pose.points[i].y;
      out[2 * kNumJoints + i] = 1.0;
    }
  }
  return out;
}

MlpConfig default_factor_config(std::uint64_t seed) {
  return {{kPoseEncodingSize, 256, 256, 256, 256, kNumGroups}, Activation::relu, seed};
}

GroupFactors predict_factors(const MlpModel& m, const KeypointSet& k) {
  if (m.output_size() != kNumGroups) throw Error(ErrorCode::shape, "factor model must have 6 outputs");
  if (m.input_size() != kPoseEncodingSize) throw Error(ErrorCode::shape, "factor model must take 54 inputs");
  const std::vector<double> raw = mlp_predict(m, encode_factor_input(k));
  std::array<double, kNumGroups> tau{};
  for (std::size_t g = 0; g < kNumGroups; ++g) tau[g] = std::exp(std::clamp(raw[g], -kRawLimit, kRawLimit));
  return GroupFactors(tau);
}

double factor_loss(std::span<const double> raw, const FactorTarget& target, std::span<double> grad_raw) {
  if (raw.size() != kNumGroups || grad_raw.size() != kNumGroups)
    throw Error(ErrorCode::shape, "factor loss expects 6 raw outputs");
  const Topology& topo = topology_default();
  std::array<double, kNumGroups> tau{};
  std::array<bool, kNumGroups> inside{};
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    inside[g] = raw[g] > -kRawLimit && raw[g] < kRawLimit;
    tau[g] = std::exp(std::clamp(raw[g], -kRawLimit, kRawLimit));
    grad_raw[g] = 0.0;
  }
  constexpr double inv = 1.0 / static_cast<double>(kNumJoints - 1);
  double loss = 0.0;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (topo.is_root(i)) continue;
    const auto g = static_cast<std::size_t>(topo.group[i]);
    const double recovered = target.scaled[i] / tau[g];
    const double d = target.original[i] - recovered;
    loss += std::abs(d);
    // d|orig - scaled e^-z| / dz = sign(d) * scaled e^-z
    if (inside[g]) grad_raw[g] += (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * recovered * inv;
  }
  return loss * inv;
}

std::array<double, kNumGroups> sample_group_scales(Rng& rng, double lo, double hi) {
  std::array<double, kNumGroups> s{};
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  double log_mean = 0.0;
  for (double& v : s) {
    v = rng.uniform(log_lo, log_hi);
    log_mean += v;
  }
  log_mean /= static_cast<double>(kNumGroups);
  for (double& v : s) v = std::exp(v - log_mean);
  return s;
}

TrainResult train_factor_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc, const MlpConfig& mc) {
  return train_factor_model(dataset, tc, mlp_init(mc, ModelKind::factor));
}

TrainResult train_factor_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc, MlpModel initial) {
  validate(tc);
  if (initial.input_size() != kPoseEncodingSize || initial.output_size() != kNumGroups)
    throw Error(ErrorCode::shape, "factor model must map 54 inputs to 6 outputs");
  const Topology& topo = topology_default();
  const std::vector<PreparedPose> poses = prepare(dataset, topo);

  TrainResult result{std::move(initial), {}};
  result.model.set_kind(ModelKind::factor);
  result.loss_history.reserve(tc.iterations);

  Rng rng(tc.seed);
  OptimizerState state;
  kernels::BatchGradient kernel;
  std::vector<std::vector<double>> inputs(tc.batch_size);
  std::vector<FactorTarget> targets(tc.batch_size);
  std::vector<double> grad;

  const kernels::LossHead head = [&targets](std::size_t b, std::span<const double> out, std::span<double> g) {
    return factor_loss(out, targets[b], g);
  };

  for (std::size_t it = 0; it < tc.iterations; ++it) {
    for (std::size_t b = 0; b < tc.batch_size; ++b) {
      const PreparedPose& p = poses[rng.index(poses.size())];
      const auto scales = sample_group_scales(rng, tc.scale_lo, tc.scale_hi);
      const PolarPose scaled = scale_groups(p.polar, scales, topo);
      inputs[b] = encode_factor_input(to_cartesian(scaled, topo));
      for (std::size_t i = 0; i < kNumJoints; ++i) {
        targets[b].original[i] = p.polar.entries[i].length / p.mean_length;
        targets[b].scaled[i] = scaled.entries[i].length / p.mean_length;
      }
    }
    result.loss_history.push_back(kernel.run_parallel(result.model, inputs, head, grad));
    optimizer_step(result.model, state, grad, tc.optimizer);
  }
  return result;
}

}  // namespace skeleform
