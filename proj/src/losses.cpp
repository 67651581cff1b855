#include "skeleform/losses.hpp"

#include <cmath>

#include "skeleform/error.hpp"
#include "skeleform/kernels.hpp"
#include "skeleform/rng.hpp"

namespace skeleform {
namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorCode::shape, std::string(what) + ": tensor shapes differ");
}

}  // namespace

LossGradient l1_loss(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "l1_loss");
  LossGradient out{0.0, ImageTensor(a.channels(), a.height(), a.width())};
  const double inv = 1.0 / static_cast<double>(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  auto g = out.gradient.values();
  double total = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    total += std::abs(d);
    g[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
  }
  out.value = total * inv;
  return out;
}

Matrix gram(const ImageTensor& f) { return kernels::gram_parallel(f); }

StyleLoss style_loss(const FeatureStack& fa, const FeatureStack& fb) {
  if (fa.empty()) throw Error(ErrorCode::shape, "style_loss: feature stack is empty");
  if (fa.size() != fb.size()) throw Error(ErrorCode::shape, "style_loss: layer counts differ");
  StyleLoss out;
  for (std::size_t l = 0; l < fa.size(); ++l) {
    const ImageTensor& a = fa[l];
    if (a.channels() != fb[l].channels())
      throw Error(ErrorCode::shape, "style_loss: channel counts differ at layer " + std::to_string(l));
    const Matrix ga = gram(a);
    const Matrix gb = gram(fb[l]);
    const std::size_t c = a.channels();
    Matrix diff(c, c);
    for (std::size_t k = 0; k < diff.data.size(); ++k) {
      diff.data[k] = ga.data[k] - gb.data[k];
      out.value += diff.data[k] * diff.data[k];
    }
    // d/dF ||G(F) - T||^2 = (4 / N) (G - T) F for symmetric G - T.
    ImageTensor grad(c, a.height(), a.width());
    const double scale = 4.0 / static_cast<double>(a.size());
    for (std::size_t m = 0; m < c; ++m) {
      auto gm = grad.channel(m);
      for (std::size_t j = 0; j < c; ++j) {
        const double d = scale * diff(m, j);
        if (d == 0.0) continue;
        const auto fj = a.channel(j);
        for (std::size_t k = 0; k < gm.size(); ++k) gm[k] += d * fj[k];
      }
    }
    out.gradients.push_back(std::move(grad));
  }
  return out;
}

std::vector<double> ChannelMeanEmbedder::embed(const ImageTensor& image) const {
  std::vector<double> out(image.channels());
  for (std::size_t c = 0; c < image.channels(); ++c) {
    double s = 0.0;
    for (double v : image.channel(c)) s += v;
    out[c] = s / static_cast<double>(image.plane());
  }
  return out;
}

RandomProjectionEmbedder::RandomProjectionEmbedder(std::size_t channels, std::size_t height, std::size_t width,
                                                   std::size_t dimension, std::uint64_t seed)
    : c_(channels), h_(height), w_(width), dimension_(dimension) {
  if (dimension == 0 || channels * height * width == 0)
    throw Error(ErrorCode::invalid_argument, "projection needs nonzero input and output sizes");
  const std::size_t n = channels * height * width;
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  projection_.resize(dimension * n);
  for (double& p : projection_) p = rng.normal() * scale;
}

std::vector<double> RandomProjectionEmbedder::embed(const ImageTensor& image) const {
  if (image.channels() != c_ || image.height() != h_ || image.width() != w_)
    throw Error(ErrorCode::shape, "projection embedder built for a different tensor shape");
  const auto x = image.values();
  std::vector<double> out(dimension_);
  for (std::size_t d = 0; d < dimension_; ++d) {
    const double* row = projection_.data() + d * x.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += row[i] * x[i];
    out[d] = acc;
  }
  return out;
}

double embedding_l1(const Embedder& e, const ImageTensor& a, const ImageTensor& b) {
  const std::vector<double> ea = e.embed(a);
  const std::vector<double> eb = e.embed(b);
  if (ea.size() != eb.size()) throw Error(ErrorCode::shape, "embeddings differ in dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::abs(ea[i] - eb[i]);
  return s;
}

double total_objective(double l1, double face, double r, const LossWeights& w) {
  return w.l1 * l1 + w.face * face + w.r * r;
}

ImageTensor avg_pool2(const ImageTensor& in) {
  if (in.height() % 2 != 0 || in.width() % 2 != 0)
    throw Error(ErrorCode::shape, "avg_pool2 needs even height and width");
  ImageTensor out(in.channels(), in.height() / 2, in.width() / 2);
  for (std::size_t c = 0; c < in.channels(); ++c)
    for (std::size_t y = 0; y < out.height(); ++y)
      for (std::size_t x = 0; x < out.width(); ++x)
        out.at(c, y, x) = 0.25 * (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) + in.at(c, 2 * y + 1, 2 * x) +
                                  in.at(c, 2 * y + 1, 2 * x + 1));
  return out;
}

FeatureStack toy_features(const ImageTensor& img, std::size_t levels, std::uint64_t seed) {
  if (levels == 0) throw Error(ErrorCode::shape, "toy_features needs at least one level");
  const std::size_t divisor = std::size_t{1} << levels;
  if (img.height() % divisor != 0 || img.width() % divisor != 0)
    throw Error(ErrorCode::shape, "toy_features: H and W must be divisible by 2^levels");

  FeatureStack stack;
  const ImageTensor* current = &img;
  for (std::size_t l = 0; l < levels; ++l) {
    const ImageTensor pooled = avg_pool2(*current);
    const std::size_t cin = pooled.channels();
    const std::size_t cout = kToyFeatureChannels;
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (l + 1)));
    const double bound = 1.0 / std::sqrt(9.0 * static_cast<double>(cin));
    std::vector<double> kernel(cout * cin * 9);
    for (double& k : kernel) k = rng.uniform(-bound, bound);

    const std::size_t h = pooled.height(), w = pooled.width();
    ImageTensor out(cout, h, w);
    for (std::size_t o = 0; o < cout; ++o)
      for (std::size_t c = 0; c < cin; ++c)
        for (std::size_t dy = 0; dy < 3; ++dy)
          for (std::size_t dx = 0; dx < 3; ++dx) {
            const double k = kernel[((o * cin + c) * 3 + dy) * 3 + dx];
            for (std::size_t y = 0; y < h; ++y) {
              const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + dy) - 1;
              if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
              for (std::size_t x = 0; x < w; ++x) {
                const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(x + dx) - 1;
                if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
                out.at(o, y, x) += k * pooled.at(c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
              }
            }
          }
    stack.push_back(std::move(out));
    current = &stack.back();
  }
  return stack;
}

}  // namespace skeleform
