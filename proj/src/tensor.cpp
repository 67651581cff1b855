#include "skeleform/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "skeleform/error.hpp"
#include "skeleform/json_util.hpp"
#include "skeleform/pose_io.hpp"

namespace skeleform {
namespace {

using json = nlohmann::json;

void check_dims(std::size_t c, std::size_t h, std::size_t w) {
  if (c == 0 || h == 0 || w == 0) throw Error(ErrorCode::shape, "tensor dimensions must be at least 1");
}

template <typename T>
T read_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

double finite(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorCode::schema, "expected a number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::schema, "non-finite tensor value", path);
  return d;
}

ImageTensor from_nested(const json& data) {
  if (!data.is_array() || data.empty() || !data[0].is_array() || data[0].empty() || !data[0][0].is_array())
    throw Error(ErrorCode::schema, "tensor data must be a nested [C][H][W] array", "data");
  const std::size_t c = data.size(), h = data[0].size(), w = data[0][0].size();
  check_dims(c, h, w);
  ImageTensor t(c, h, w);
  for (std::size_t i = 0; i < c; ++i) {
    if (!data[i].is_array() || data[i].size() != h) throw Error(ErrorCode::shape, "ragged tensor", "data[" + std::to_string(i) + "]");
    for (std::size_t y = 0; y < h; ++y) {
      const json& row = data[i][y];
      const std::string rp = "data[" + std::to_string(i) + "][" + std::to_string(y) + "]";
      if (!row.is_array() || row.size() != w) throw Error(ErrorCode::shape, "ragged tensor", rp);
      for (std::size_t x = 0; x < w; ++x) t.at(i, y, x) = finite(row[x], rp + "[" + std::to_string(x) + "]");
    }
  }
  return t;
}

}  // namespace

ImageTensor::ImageTensor(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : c_(channels), h_(height), w_(width), values_(channels * height * width, fill) {
  check_dims(c_, h_, w_);
}

ImageTensor::ImageTensor(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> values)
    : c_(channels), h_(height), w_(width), values_(std::move(values)) {
  check_dims(c_, h_, w_);
  if (values_.size() != c_ * h_ * w_) throw Error(ErrorCode::shape, "value count does not match C*H*W");
}

ImageTensor tensor_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (j.is_array()) return from_nested(j);
  if (!j.is_object()) throw Error(ErrorCode::schema, "tensor must be an object or nested array", "$");
  if (j.contains("data") && j["data"].is_array()) return from_nested(j["data"]);

  const auto shape = j.find("shape");
  if (shape == j.end() || !shape->is_array() || shape->size() != 3)
    throw Error(ErrorCode::schema, "header needs shape [C,H,W]", "shape");
  std::size_t dims[3];
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(*shape)[i].is_number_unsigned()) throw Error(ErrorCode::schema, "shape entries must be positive integers", "shape");
    dims[i] = (*shape)[i].get<std::size_t>();
  }
  check_dims(dims[0], dims[1], dims[2]);
  const std::string dtype = j.value("dtype", std::string("f32"));
  if (dtype != "f32" && dtype != "f64") throw Error(ErrorCode::schema, "dtype must be f32 or f64", "dtype");
  const std::size_t width = dtype == "f32" ? 4 : 8;

  std::filesystem::path file;
  if (const auto df = j.find("data_file"); df != j.end()) {
    if (!df->is_string()) throw Error(ErrorCode::schema, "data_file must be a string", "data_file");
    file = base_dir / df->get<std::string>();
  } else {
    throw Error(ErrorCode::schema, "header without data_file needs a source path", "data_file");
  }
  const std::string raw = read_file(file);
  const std::size_t count = dims[0] * dims[1] * dims[2];
  if (raw.size() != count * width)
    throw Error(ErrorCode::shape,
                "binary file holds " + std::to_string(raw.size()) + " bytes, expected " + std::to_string(count * width),
                file.string());
  std::vector<double> values(count);
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = width == 4 ? static_cast<double>(read_le<float>(bytes + 4 * i)) : read_le<double>(bytes + 8 * i);
    if (!std::isfinite(values[i])) throw Error(ErrorCode::schema, "non-finite tensor value", file.string());
  }
  return ImageTensor(dims[0], dims[1], dims[2], std::move(values));
}

ImageTensor load_tensor(const std::filesystem::path& path) {
  json j = parse_json(read_file(path), path.string());
  if (j.is_object() && j.contains("shape") && !j.contains("data") && !j.contains("data_file")) {
    std::filesystem::path sibling = path;
    sibling.replace_extension(".bin");
    j["data_file"] = sibling.filename().string();
  }
  return tensor_from_json(j, path.parent_path());
}

json tensor_to_json(const ImageTensor& t) {
  json data = json::array();
  for (std::size_t c = 0; c < t.channels(); ++c) {
    json plane = json::array();
    for (std::size_t y = 0; y < t.height(); ++y) {
      json row = json::array();
      for (std::size_t x = 0; x < t.width(); ++x) row.push_back(t.at(c, y, x));
      plane.push_back(std::move(row));
    }
    data.push_back(std::move(plane));
  }
  return json{{"shape", {t.channels(), t.height(), t.width()}}, {"data", std::move(data)}};
}

void save_tensor_binary(const std::filesystem::path& header, const ImageTensor& t) {
  std::filesystem::path bin = header;
  bin.replace_extension(".bin");
  std::string raw(t.size() * 4, '\0');
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(t.values()[i]));
    for (std::size_t b = 0; b < 4; ++b) raw[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  write_file(bin, raw);
  const json h{{"shape", {t.channels(), t.height(), t.width()}}, {"dtype", "f32"}, {"data_file", bin.filename().string()}};
  write_file(header, h.dump());
}

}  // namespace skeleform
