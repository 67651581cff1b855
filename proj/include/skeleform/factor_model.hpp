#pragma once

#include <array>
#include <span>
#include <vector>

#include "skeleform/deform.hpp"
#include "skeleform/keypoints.hpp"
#include "skeleform/mlp.hpp"
#include "skeleform/rng.hpp"
#include "skeleform/training.hpp"

namespace skeleform {

/// 18 x (x, y) normalized coordinates followed by 18 visibility bits.
inline constexpr std::size_t kPoseEncodingSize = 3 * kNumJoints;

/// Neck-centred, mean-segment-scaled coordinates (invisible joints zeroed)
/// concatenated with the visibility bits. Invariant to translation and
/// uniform scale.
std::vector<double> encode_factor_input(const KeypointSet& k);

/// [54, 256, 256, 256, 256, 6], relu: five weight layers of width 256.
MlpConfig default_factor_config(std::uint64_t seed = 0);

/// tau[g] = exp(raw output g).
GroupFactors predict_factors(const MlpModel& m, const KeypointSet& k);

/// One training example: the original and scaled per-joint segment lengths,
/// both divided by the original pose's mean segment length.
struct FactorTarget {
  std::array<double, kNumJoints> original{};
  std::array<double, kNumJoints> scaled{};
};

/// Mean over non-root segments of |original_i - scaled_i / exp(raw[g(i)])|.
/// Writes d loss / d raw into `grad_raw` (size 6).
double factor_loss(std::span<const double> raw, const FactorTarget& target, std::span<double> grad_raw);

/// Per-group scales drawn log-uniformly from [lo, hi], then divided by their
/// geometric mean. The encoding discards overall size, so only scales with a
/// fixed geometric mean are recoverable from it.
std::array<double, kNumGroups> sample_group_scales(Rng& rng, double lo, double hi);

/// Trains the factor predictor by recovering random per-group rescalings of
/// dataset poses. Poses with invisible joints are skipped (Error
/// empty_dataset if none remain).
TrainResult train_factor_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc, const MlpConfig& mc);
TrainResult train_factor_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc, MlpModel initial);

}  // namespace skeleform
