#pragma once

#include <span>
#include <vector>

#include "skeleform/keypoints.hpp"
#include "skeleform/mlp.hpp"
#include "skeleform/rng.hpp"
#include "skeleform/training.hpp"

namespace skeleform {

/// [54, 256, 256, 256, 256, 36], relu.
MlpConfig default_completion_config(std::uint64_t seed = 0);

/// Hides every non-neck joint independently with probability p. Hidden joints
/// get zeroed coordinates.
KeypointSet mask_pose(const KeypointSet& k, double p, Rng& rng);

/// Mean absolute error over the coordinates of joints with observed[i] ==
/// false; zero when nothing is masked. `target` holds 36 normalized
/// coordinates.
double completion_loss(std::span<const double> prediction, std::span<const double> target,
                       const std::array<bool, kNumJoints>& observed, std::span<double> grad_prediction);

/// Trains the completion regressor on randomly masked copies of fully
/// visible dataset poses.
TrainResult train_completion_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc,
                                   const MlpConfig& mc);
TrainResult train_completion_model(const std::vector<KeypointSet>& dataset, const TrainConfig& tc,
                                   MlpModel initial);

/// Fills invisible joints from the model. Visible joints are copied through
/// unchanged; every output joint is visible. Requires a visible neck.
KeypointSet complete_pose(const MlpModel& m, const KeypointSet& k);

}  // namespace skeleform
