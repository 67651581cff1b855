#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "skeleform/tensor.hpp"

namespace skeleform {

struct LossGradient {
  double value = 0.0;
  ImageTensor gradient;  // d value / d first argument
};

/// Mean absolute difference; gradient sign(a - b) / N with sign(0) = 0.
LossGradient l1_loss(const ImageTensor& a, const ImageTensor& b);

/// G[i][j] = sum_{h,w} f[i][h][w] f[j][h][w] / (C H W).
Matrix gram(const ImageTensor& f);

struct StyleLoss {
  double value = 0.0;
  std::vector<ImageTensor> gradients;  // one per layer of the first stack
};

/// Sum over layers of the squared Frobenius distance between Gram matrices.
/// Layer counts and per-layer channel counts must match; spatial sizes may differ.
StyleLoss style_loss(const FeatureStack& fa, const FeatureStack& fb);

/// Deterministic image -> vector map standing in for a pretrained encoder.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const ImageTensor& image) const = 0;
};

/// Per-channel spatial mean; output dimension C.
class ChannelMeanEmbedder final : public Embedder {
 public:
  std::vector<double> embed(const ImageTensor& image) const override;
};

/// Fixed seeded Gaussian projection of the flattened tensor, scaled by
/// 1/sqrt(input size). Accepts only the shape it was built for.
class RandomProjectionEmbedder final : public Embedder {
 public:
  RandomProjectionEmbedder(std::size_t channels, std::size_t height, std::size_t width, std::size_t dimension,
                           std::uint64_t seed);
  std::vector<double> embed(const ImageTensor& image) const override;
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t c_, h_, w_, dimension_;
  std::vector<double> projection_;  // dimension x (C H W)
};

/// Sum-reduced L1 distance between the two embeddings.
double embedding_l1(const Embedder& e, const ImageTensor& a, const ImageTensor& b);

/// Objective weights; defaults are the reconstruction/face/style coefficients
/// used for fine-tuning (200, 1, 1).
struct LossWeights {
  double l1 = 200.0;
  double face = 1.0;
  double r = 1.0;
};

double total_objective(double l1, double face, double r, const LossWeights& w = {});

/// 2x2 average pooling; H and W must be even.
ImageTensor avg_pool2(const ImageTensor& in);

inline constexpr std::size_t kToyFeatureChannels = 8;

/// Pretrained-free feature pyramid: each level average-pools by 2 and applies
/// a fixed seeded 3x3 convolution (zero padding) to kToyFeatureChannels
/// channels. Level l has spatial size H / 2^l x W / 2^l.
FeatureStack toy_features(const ImageTensor& img, std::size_t levels, std::uint64_t seed = 0);

}  // namespace skeleform
