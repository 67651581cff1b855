#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skeleform/keypoints.hpp"

namespace skeleform {

struct PoseDocument {
  std::vector<KeypointSet> poses;
  std::string source;
  std::optional<std::pair<double, double>> image_size;
  friend bool operator==(const PoseDocument&, const PoseDocument&) = default;
};

/// Serialized coordinates carry this many fractional digits.
inline constexpr int kCoordinateDecimals = 6;

/// OpenPose "people[*].pose_keypoints_2d" (18 x (x, y, confidence)). A joint
/// is visible when its confidence exceeds `confidence_threshold`.
PoseDocument parse_openpose(std::string_view text, double confidence_threshold = 0.0);

/// Canonical versioned format:
/// {"version":1,"poses":[{"joints":[{"name":..,"x":..,"y":..,"visible":true},..]}],
///  "image_size":[w,h]?,"source":".."?}
std::string write_pose(const PoseDocument& doc);
nlohmann::ordered_json pose_document_to_json(const PoseDocument& doc);
nlohmann::ordered_json pose_to_json(const KeypointSet& pose);

PoseDocument parse_canonical(std::string_view text);
PoseDocument pose_document_from_json(const nlohmann::json& j, const std::string& path = {});
KeypointSet pose_from_json(const nlohmann::json& j, const std::string& path = {});

/// Picks the canonical parser when the text has a top-level "version",
/// otherwise the OpenPose one.
PoseDocument parse_any(std::string_view text, double confidence_threshold = 0.0);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

struct LoadWarning {
  std::filesystem::path file;
  std::string message;
};

struct Dataset {
  std::vector<KeypointSet> poses;
  std::vector<LoadWarning> warnings;
};

/// Reads every *.json file in `dir` in filename order. Unparseable files are
/// reported in `warnings` and skipped; an unreadable directory throws Error(io).
Dataset load_dataset(const std::filesystem::path& dir, double confidence_threshold = 0.0);

}  // namespace skeleform
