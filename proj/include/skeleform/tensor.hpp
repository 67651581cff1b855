#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace skeleform {

/// C x H x W grid of reals, row-major with channel outermost.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  ImageTensor(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t channels() const { return c_; }
  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  std::size_t plane() const { return h_ * w_; }
  std::size_t size() const { return values_.size(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) { return values_[(c * h_ + y) * w_ + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return values_[(c * h_ + y) * w_ + x]; }
  std::span<double> channel(std::size_t c) { return std::span(values_).subspan(c * plane(), plane()); }
  std::span<const double> channel(std::size_t c) const { return std::span(values_).subspan(c * plane(), plane()); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const ImageTensor& o) const { return c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }
  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t c_ = 0, h_ = 0, w_ = 0;
  std::vector<double> values_;
};

using FeatureStack = std::vector<ImageTensor>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Reads a tensor file. Two layouts are accepted:
///  - {"shape":[C,H,W],"dtype":"f32"|"f64"} with raw little-endian row-major
///    values in a sibling file ("data_file" key, default: same stem + ".bin");
///  - a nested [C][H][W] array, bare or under {"data": ...}.
ImageTensor load_tensor(const std::filesystem::path& path);
ImageTensor tensor_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json tensor_to_json(const ImageTensor& t);
/// Writes header JSON at `header` and f32 values to the sibling .bin file.
void save_tensor_binary(const std::filesystem::path& header, const ImageTensor& t);

}  // namespace skeleform
