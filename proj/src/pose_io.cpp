#include "skeleform/pose_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skeleform/error.hpp"
#include "skeleform/json_util.hpp"

namespace skeleform {
namespace {

using json = nlohmann::json;

double finite_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw Error(ErrorCode::schema, "expected a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::schema, "number is not finite", path);
  return v;
}

double quantize(double v) {
  constexpr double kScale = 1e6;
  static_assert(kCoordinateDecimals == 6);
  if (std::abs(v) >= 1e15) return v;
  return std::round(v * kScale) / kScale;
}

KeypointSet person_from_openpose(const json& person, const std::string& path, double threshold) {
  if (!person.is_object()) throw Error(ErrorCode::schema, "person must be an object", path);
  const auto it = person.find("pose_keypoints_2d");
  const std::string kp_path = path + ".pose_keypoints_2d";
  if (it == person.end()) throw Error(ErrorCode::schema, "missing pose_keypoints_2d", kp_path);
  if (!it->is_array()) throw Error(ErrorCode::schema, "pose_keypoints_2d must be an array", kp_path);
  if (it->size() != 3 * kNumJoints)
    throw Error(ErrorCode::schema,
                "pose_keypoints_2d has " + std::to_string(it->size()) + " values, expected " +
                    std::to_string(3 * kNumJoints),
                kp_path);

  KeypointSet k;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    const double x = finite_number((*it)[3 * i], kp_path + "[" + std::to_string(3 * i) + "]");
    const double y = finite_number((*it)[3 * i + 1], kp_path + "[" + std::to_string(3 * i + 1) + "]");
    const double c = finite_number((*it)[3 * i + 2], kp_path + "[" + std::to_string(3 * i + 2) + "]");
    k.visible[i] = c > threshold;
    if (k.visible[i]) k.points[i] = {x, y};
  }
  return k;
}

}  // namespace

PoseDocument parse_openpose(std::string_view text, double confidence_threshold) {
  const json j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorCode::schema, "top level must be an object", "$");
  const auto people = j.find("people");
  if (people == j.end()) throw Error(ErrorCode::schema, "missing 'people' array", "people");
  if (!people->is_array()) throw Error(ErrorCode::schema, "'people' must be an array", "people");

  PoseDocument doc;
  doc.source = "openpose";
  for (std::size_t p = 0; p < people->size(); ++p)
    doc.poses.push_back(person_from_openpose((*people)[p], "people[" + std::to_string(p) + "]", confidence_threshold));
  return doc;
}

nlohmann::ordered_json pose_to_json(const KeypointSet& pose) {
  nlohmann::ordered_json joints = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    nlohmann::ordered_json joint;
    joint["name"] = joint_name(i);
    if (pose.visible[i]) {
      joint["x"] = quantize(pose.points[i].x);
      joint["y"] = quantize(pose.points[i].y);
    }
    joint["visible"] = static_cast<bool>(pose.visible[i]);
    joints.push_back(std::move(joint));
  }
  nlohmann::ordered_json out;
  out["joints"] = std::move(joints);
  return out;
}

nlohmann::ordered_json pose_document_to_json(const PoseDocument& doc) {
  nlohmann::ordered_json out;
  out["version"] = 1;
  out["poses"] = nlohmann::ordered_json::array();
  for (const KeypointSet& k : doc.poses) out["poses"].push_back(pose_to_json(k));
  if (doc.image_size) out["image_size"] = {doc.image_size->first, doc.image_size->second};
  if (!doc.source.empty()) out["source"] = doc.source;
  return out;
}

std::string write_pose(const PoseDocument& doc) { return pose_document_to_json(doc).dump(); }

KeypointSet pose_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::schema, "pose must be an object", path);
  const auto joints = j.find("joints");
  const std::string jp = path.empty() ? "joints" : path + ".joints";
  if (joints == j.end() || !joints->is_array()) throw Error(ErrorCode::schema, "missing 'joints' array", jp);
  if (joints->size() != kNumJoints)
    throw Error(ErrorCode::schema, "expected 18 joints, got " + std::to_string(joints->size()), jp);

  KeypointSet k;
  std::array<bool, kNumJoints> seen{};
  for (std::size_t e = 0; e < kNumJoints; ++e) {
    const json& joint = (*joints)[e];
    const std::string ep = jp + "[" + std::to_string(e) + "]";
    if (!joint.is_object()) throw Error(ErrorCode::schema, "joint must be an object", ep);
    const auto name = joint.find("name");
    if (name == joint.end() || !name->is_string()) throw Error(ErrorCode::schema, "joint needs a 'name'", ep + ".name");
    const auto idx = joint_from_name(name->get_ref<const std::string&>());
    if (!idx) throw Error(ErrorCode::schema, "unknown joint name", ep + ".name");
    if (seen[*idx]) throw Error(ErrorCode::schema, "duplicate joint name", ep + ".name");
    seen[*idx] = true;

    const auto vis = joint.find("visible");
    if (vis == joint.end() || !vis->is_boolean())
      throw Error(ErrorCode::schema, "joint needs a boolean 'visible'", ep + ".visible");
    k.visible[*idx] = vis->get<bool>();
    if (k.visible[*idx]) {
      const auto x = joint.find("x");
      const auto y = joint.find("y");
      if (x == joint.end()) throw Error(ErrorCode::schema, "visible joint needs 'x'", ep + ".x");
      if (y == joint.end()) throw Error(ErrorCode::schema, "visible joint needs 'y'", ep + ".y");
      k.points[*idx] = {finite_number(*x, ep + ".x"), finite_number(*y, ep + ".y")};
    }
  }
  return k;
}

PoseDocument pose_document_from_json(const json& j, const std::string& path) {
  const auto at = [&](const char* key) { return path.empty() ? std::string(key) : path + "." + key; };
  if (!j.is_object()) throw Error(ErrorCode::schema, "document must be an object", path.empty() ? "$" : path);
  const auto version = j.find("version");
  if (version == j.end()) throw Error(ErrorCode::schema, "missing 'version'", at("version"));
  if (!version->is_number_integer() || version->get<long long>() != 1)
    throw Error(ErrorCode::schema, "unsupported version " + version->dump(), at("version"));

  const auto poses = j.find("poses");
  if (poses == j.end() || !poses->is_array()) throw Error(ErrorCode::schema, "missing 'poses' array", at("poses"));

  PoseDocument doc;
  for (std::size_t p = 0; p < poses->size(); ++p)
    doc.poses.push_back(pose_from_json((*poses)[p], at("poses") + "[" + std::to_string(p) + "]"));

  if (const auto size = j.find("image_size"); size != j.end() && !size->is_null()) {
    if (!size->is_array() || size->size() != 2) throw Error(ErrorCode::schema, "image_size must be [w, h]", at("image_size"));
    doc.image_size = std::pair{finite_number((*size)[0], at("image_size[0]")),
                               finite_number((*size)[1], at("image_size[1]"))};
  }
  if (const auto src = j.find("source"); src != j.end() && !src->is_null()) {
    if (!src->is_string()) throw Error(ErrorCode::schema, "source must be a string", at("source"));
    doc.source = src->get<std::string>();
  }
  return doc;
}

PoseDocument parse_canonical(std::string_view text) { return pose_document_from_json(parse_json(text)); }

PoseDocument parse_any(std::string_view text, double confidence_threshold) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("version")) return pose_document_from_json(j);
  return parse_openpose(text, confidence_threshold);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string(), path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::io, "short write to " + path.string(), path.string());
}

Dataset load_dataset(const std::filesystem::path& dir, double confidence_threshold) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot read directory " + dir.string() + ": " + ec.message(), dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : it)
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  Dataset out;
  for (const fs::path& f : files) {
    try {
      PoseDocument doc = parse_any(read_file(f), confidence_threshold);
      out.poses.insert(out.poses.end(), doc.poses.begin(), doc.poses.end());
    } catch (const Error& e) {
      std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      if (!e.path().empty()) msg += " at " + e.path();
      out.warnings.push_back({f, std::move(msg)});
    }
  }
  return out;
}

}  // namespace skeleform
