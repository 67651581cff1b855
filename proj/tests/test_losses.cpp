#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "skeleform/error.hpp"
#include "skeleform/losses.hpp"
#include "skeleform/mlp.hpp"
#include "skeleform/pose_io.hpp"
#include "skeleform/tensor.hpp"
#include "support.hpp"

using namespace skeleform;
using skeleform::test::random_tensor;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

// Cyclic Jacobi eigenvalues of a small symmetric matrix.
std::vector<double> eigenvalues(Matrix a) {
  const std::size_t n = a.rows;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  return ev;
}

// Nudges values away from exact ties so |.| is differentiable at every probe.
ImageTensor untied(skeleform::Rng& rng, const ImageTensor& b) {
  ImageTensor a = b;
  for (double& v : a.values()) v += (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.01, 0.5);
  return a;
}

}  // namespace

TEST_CASE("ImageTensor shape rules") {
  CHECK(code_of([] { ImageTensor(0, 2, 2); }) == ErrorCode::shape);
  CHECK(code_of([] { ImageTensor(1, 2, 2, std::vector<double>(3)); }) == ErrorCode::shape);
  ImageTensor t(2, 3, 4);
  t.at(1, 2, 3) = 5.0;
  CHECK(t.values().back() == 5.0);
  CHECK(t.channel(1).size() == 12);
}

TEST_CASE("tensor files") {
  const auto dir = std::filesystem::temp_directory_path() / "skeleform_tensor_test";
  std::filesystem::create_directories(dir);
  skeleform::Rng rng(61);
  const ImageTensor t = random_tensor(rng, 2, 3, 4);
  SUBCASE("binary f32") {
    save_tensor_binary(dir / "t.json", t);
    const ImageTensor back = load_tensor(dir / "t.json");
    REQUIRE(back.same_shape(t));
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(back.values()[i] == static_cast<double>(static_cast<float>(t.values()[i])));
  }
  SUBCASE("nested json") {
    write_file(dir / "n.json", tensor_to_json(t).dump());
    CHECK(load_tensor(dir / "n.json") == t);
    write_file(dir / "bare.json", "[[[1,2],[3,4]]]");
    const ImageTensor b = load_tensor(dir / "bare.json");
    CHECK(b.channels() == 1);
    CHECK(b.at(0, 1, 0) == 3.0);
  }
  SUBCASE("f32 header") {
    std::vector<float> raw{1.5f, -2.0f, 0.25f, 4.0f};
    write_file(dir / "f.bin", std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size() * 4));
    write_file(dir / "f.json", R"({"shape":[1,2,2],"dtype":"f32","data_file":"f.bin"})");
    const ImageTensor f = load_tensor(dir / "f.json");
    CHECK(f.at(0, 0, 1) == -2.0);
    CHECK(f.at(0, 1, 1) == 4.0);
  }
  SUBCASE("errors") {
    write_file(dir / "s.bin", std::string(8, '\0'));
    write_file(dir / "s.json", R"({"shape":[1,2,2],"dtype":"f32","data_file":"s.bin"})");
    CHECK(code_of([&] { load_tensor(dir / "s.json"); }) == ErrorCode::shape);
    write_file(dir / "r.json", "[[[1,2],[3]]]");
    CHECK(code_of([&] { load_tensor(dir / "r.json"); }) == ErrorCode::shape);
    write_file(dir / "d.json", R"({"shape":[1,1,1],"dtype":"i8"})");
    CHECK(code_of([&] { load_tensor(dir / "d.json"); }) == ErrorCode::schema);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("l1_loss") {
  const ImageTensor a(1, 1, 2, {1, 2}), b(1, 1, 2, {0, 4});
  const LossGradient r = l1_loss(a, b);
  CHECK(r.value == 1.5);
  CHECK(r.gradient.values()[0] == 0.5);
  CHECK(r.gradient.values()[1] == -0.5);
  const LossGradient same = l1_loss(a, a);
  CHECK(same.value == 0.0);
  for (double g : same.gradient.values()) CHECK(g == 0.0);
  CHECK(code_of([&] { l1_loss(a, ImageTensor(1, 2, 1)); }) == ErrorCode::shape);
}

TEST_CASE("l1_loss gradient matches central differences") {
  skeleform::Rng rng(62);
  double worst = 0.0;
  int probes = 0;
  for (int n = 0; n < 10; ++n) {
    const ImageTensor b = random_tensor(rng, 3, 4, 5);
    ImageTensor a = untied(rng, b);
    const LossGradient g = l1_loss(a, b);
    for (int k = 0; k < 12; ++k) {
      const std::size_t i = rng.index(a.size());
      const double saved = a.values()[i];
      a.values()[i] = saved + 1e-5;
      const double up = l1_loss(a, b).value;
      a.values()[i] = saved - 1e-5;
      const double down = l1_loss(a, b).value;
      a.values()[i] = saved;
      worst = std::max(worst, relative_error(g.gradient.values()[i], (up - down) / 2e-5));
      ++probes;
    }
  }
  CHECK(probes >= 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("gram") {
  const Matrix ones = gram(ImageTensor(2, 2, 2, 1.0));
  for (double v : ones.data) CHECK(v == 0.5);
  skeleform::Rng rng(63);
  for (int n = 0; n < 50; ++n) {
    const ImageTensor f = random_tensor(rng, 1 + rng.index(6), 1 + rng.index(5), 1 + rng.index(5));
    const Matrix g = gram(f);
    for (std::size_t i = 0; i < g.rows; ++i)
      for (std::size_t j = 0; j < g.cols; ++j) CHECK(g(i, j) == g(j, i));
    for (double ev : eigenvalues(g)) CHECK(ev >= -1e-10);

    // Spatial permutation, the same for every channel.
    std::vector<std::size_t> perm(f.plane());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    ImageTensor p(f.channels(), f.height(), f.width());
    for (std::size_t c = 0; c < f.channels(); ++c)
      for (std::size_t i = 0; i < perm.size(); ++i) p.channel(c)[i] = f.channel(c)[perm[i]];
    const Matrix gp = gram(p);
    for (std::size_t i = 0; i < g.data.size(); ++i) CHECK(gp.data[i] == doctest::Approx(g.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("style_loss") {
  SUBCASE("identical stacks") {
    skeleform::Rng rng(64);
    const FeatureStack f{random_tensor(rng, 3, 4, 4), random_tensor(rng, 5, 2, 2)};
    const StyleLoss s = style_loss(f, f);
    CHECK(s.value == 0.0);
    for (const auto& g : s.gradients)
      for (double v : g.values()) CHECK(v == 0.0);
  }
  SUBCASE("constant single channel") {
    for (auto [u, v] : {std::pair{2.0, 1.0}, std::pair{0.5, -1.5}, std::pair{3.0, 0.0}}) {
      const StyleLoss s = style_loss({ImageTensor(1, 3, 2, u)}, {ImageTensor(1, 4, 4, v)});
      CHECK(s.value == doctest::Approx((u * u - v * v) * (u * u - v * v)).epsilon(1e-12));
    }
  }
  SUBCASE("shape errors") {
    CHECK(code_of([] { style_loss({ImageTensor(2, 2, 2)}, {ImageTensor(3, 2, 2)}); }) == ErrorCode::shape);
    CHECK(code_of([] { style_loss({ImageTensor(2, 2, 2)}, {}); }) == ErrorCode::shape);
  }
  SUBCASE("gradient matches central differences") {
    skeleform::Rng rng(65);
    double worst = 0.0;
    int probes = 0;
    for (int n = 0; n < 10; ++n) {
      FeatureStack fa{random_tensor(rng, 3, 4, 4), random_tensor(rng, 4, 2, 3)};
      const FeatureStack fb{random_tensor(rng, 3, 3, 3), random_tensor(rng, 4, 2, 2)};
      const StyleLoss s = style_loss(fa, fb);
      for (int k = 0; k < 12; ++k) {
        const std::size_t l = rng.index(2);
        const std::size_t i = rng.index(fa[l].size());
        const double saved = fa[l].values()[i];
        fa[l].values()[i] = saved + 1e-5;
        const double up = style_loss(fa, fb).value;
        fa[l].values()[i] = saved - 1e-5;
        const double down = style_loss(fa, fb).value;
        fa[l].values()[i] = saved;
        worst = std::max(worst, relative_error(s.gradients[l].values()[i], (up - down) / 2e-5));
        ++probes;
      }
    }
    CHECK(probes >= 100);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("embedders") {
  skeleform::Rng rng(66);
  const ImageTensor a = random_tensor(rng, 3, 4, 4), b = random_tensor(rng, 3, 4, 4);
  const ChannelMeanEmbedder mean;
  CHECK(embedding_l1(mean, a, a) == 0.0);
  CHECK(embedding_l1(mean, ImageTensor(3, 2, 2, 1.0), ImageTensor(3, 2, 2, 0.0)) == 3.0);
  const RandomProjectionEmbedder proj(3, 4, 4, 16, 9);
  CHECK(proj.embed(a) == proj.embed(a));
  CHECK(RandomProjectionEmbedder(3, 4, 4, 16, 9).embed(a) == proj.embed(a));
  CHECK_FALSE(RandomProjectionEmbedder(3, 4, 4, 16, 10).embed(a) == proj.embed(a));
  CHECK(proj.embed(a).size() == 16);
  CHECK(embedding_l1(proj, a, a) == 0.0);
  CHECK(embedding_l1(proj, a, b) > 0.0);
  CHECK(code_of([&] { proj.embed(ImageTensor(3, 2, 2)); }) == ErrorCode::shape);
}

TEST_CASE("losses are non-negative") {
  skeleform::Rng rng(67);
  const RandomProjectionEmbedder proj(2, 4, 4, 8, 1);
  for (int n = 0; n < 50; ++n) {
    const ImageTensor a = random_tensor(rng, 2, 4, 4), b = random_tensor(rng, 2, 4, 4);
    CHECK(l1_loss(a, b).value >= 0.0);
    CHECK(style_loss({a}, {b}).value >= 0.0);
    CHECK(embedding_l1(proj, a, b) >= 0.0);
    CHECK(embedding_l1(ChannelMeanEmbedder{}, a, b) >= 0.0);
  }
}

TEST_CASE("total_objective") {
  CHECK(total_objective(0.1, 0.2, 0.3) == doctest::Approx(20.5).epsilon(1e-14));
  CHECK(total_objective(0, 0, 0) == 0.0);
  CHECK(total_objective(0.2, 0.4, 0.6) == doctest::Approx(2.0 * total_objective(0.1, 0.2, 0.3)));
  const LossWeights w{2.0, 3.0, 5.0};
  CHECK(total_objective(1.0, 0.0, 0.0, w) == 2.0);
  CHECK(total_objective(0.0, 1.0, 0.0, w) == 3.0);
  CHECK(total_objective(0.0, 0.0, 1.0, w) == 5.0);
}

TEST_CASE("toy_features") {
  skeleform::Rng rng(68);
  SUBCASE("shape rule") {
    const FeatureStack f = toy_features(random_tensor(rng, 1, 4, 4), 1);
    REQUIRE(f.size() == 1);
    CHECK(f[0].channels() == kToyFeatureChannels);
    CHECK(f[0].height() == 2);
    CHECK(f[0].width() == 2);
    const FeatureStack g = toy_features(random_tensor(rng, 3, 16, 8), 3);
    CHECK(g.size() == 3);
    CHECK(g[2].height() == 2);
    CHECK(g[2].width() == 1);
  }
  SUBCASE("deterministic per seed") {
    const ImageTensor img = random_tensor(rng, 3, 8, 8);
    CHECK(toy_features(img, 2, 5) == toy_features(img, 2, 5));
    CHECK_FALSE(toy_features(img, 2, 5) == toy_features(img, 2, 6));
  }
  SUBCASE("pooling equals window means") {
    const ImageTensor img = random_tensor(rng, 2, 6, 8);
    const ImageTensor p = avg_pool2(img);
    CHECK(p.height() == 3);
    CHECK(p.width() == 4);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 4; ++x) {
          double s = 0.0;
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dx = 0; dx < 2; ++dx) s += img.at(c, 2 * y + dy, 2 * x + dx);
          CHECK(std::abs(p.at(c, y, x) - s / 4.0) <= 1e-12);
        }
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { toy_features(random_tensor(rng, 1, 6, 6), 2); }) == ErrorCode::shape);
    CHECK(code_of([&] { toy_features(random_tensor(rng, 1, 4, 4), 0); }) == ErrorCode::shape);
    CHECK(code_of([&] { avg_pool2(random_tensor(rng, 1, 3, 4)); }) == ErrorCode::shape);
  }
}
