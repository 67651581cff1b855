#include <doctest.h>

#include <filesystem>
#include <regex>

#include <json.hpp>

#include "skeleform/error.hpp"
#include "skeleform/pose_io.hpp"
#include "skeleform/svg.hpp"
#include "support.hpp"

using namespace skeleform;
namespace fs = std::filesystem;

namespace {

std::string openpose_person(const std::vector<double>& keypoints) {
  nlohmann::json person;
  person["pose_keypoints_2d"] = keypoints;
  nlohmann::json doc;
  doc["people"] = {person};
  return doc.dump();
}

// Coordinates already on the 1e-6 grid so the round trip is exact.
PoseDocument random_document(skeleform::Rng& rng) {
  PoseDocument doc;
  const std::size_t n = rng.index(4);
  for (std::size_t p = 0; p < n; ++p) {
    KeypointSet k;
    for (std::size_t i = 0; i < kNumJoints; ++i) {
      k.visible[i] = rng.bernoulli(0.8);
      if (k.visible[i])
        k.points[i] = {std::round(rng.uniform(-2000.0, 2000.0) * 1e6) / 1e6,
                       std::round(rng.uniform(-2000.0, 2000.0) * 1e6) / 1e6};
    }
    doc.poses.push_back(k);
  }
  if (rng.bernoulli(0.5)) doc.image_size = std::pair{double(1 + rng.index(2000)), double(1 + rng.index(2000))};
  if (rng.bernoulli(0.5)) doc.source = "doc" + std::to_string(rng.index(1000));
  return doc;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("skeleform_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("parse_openpose maps fields and confidence") {
  std::vector<double> kp(54, 0.0);
  kp[0] = 10;
  kp[1] = 20;
  kp[2] = 0.9;
  const PoseDocument doc = parse_openpose(openpose_person(kp));
  REQUIRE(doc.poses.size() == 1);
  CHECK(doc.poses[0].visible[0]);
  CHECK(doc.poses[0].points[0] == Vec2{10, 20});
  CHECK_FALSE(doc.poses[0].visible[17]);
  for (std::size_t i = 1; i < kNumJoints; ++i) CHECK_FALSE(doc.poses[0].visible[i]);
}

TEST_CASE("parse_openpose confidence threshold") {
  std::vector<double> kp(54, 0.0);
  kp[2] = 0.3;
  kp[5] = 0.7;
  const PoseDocument doc = parse_openpose(openpose_person(kp), 0.5);
  CHECK_FALSE(doc.poses[0].visible[0]);
  CHECK(doc.poses[0].visible[1]);
}

TEST_CASE("parse_openpose empty people and errors") {
  CHECK(parse_openpose(R"({"people":[]})").poses.empty());
  nlohmann::json two;
  two["people"] = {{{"pose_keypoints_2d", std::vector<double>(54, 1.0)}},
                   {{"pose_keypoints_2d", std::vector<double>(53, 1.0)}}};
  try {
    parse_openpose(two.dump());
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    CHECK(e.path().find("people[1]") != std::string::npos);
  }
  try {
    parse_openpose(R"({"people":[{"pose_keypoints_2d":[1,2,)");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    CHECK(e.path().rfind("byte ", 0) == 0);
  }
  CHECK(code_of([] { parse_openpose(R"({"persons":[]})"); }) == ErrorCode::schema);
  CHECK(code_of([] { parse_openpose(R"({"people":[{"pose_keypoints_2d":[1e999]}]})"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_canonical("[1e999]"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_openpose(R"([1,2])"); }) == ErrorCode::schema);
  CHECK(code_of([] { parse_openpose(R"({"people":[{"pose_keypoints_2d":"x"}]})"); }) == ErrorCode::schema);
}

TEST_CASE("write_pose format") {
  CHECK(write_pose(PoseDocument{}) == R"({"version":1,"poses":[]})");
  PoseDocument doc;
  KeypointSet k;
  k.visible.fill(true);
  k.visible[r_wrist] = false;
  doc.poses.push_back(k);
  const auto j = nlohmann::json::parse(write_pose(doc));
  const auto& wrist = j["poses"][0]["joints"][static_cast<std::size_t>(r_wrist)];
  CHECK(wrist["name"] == "r_wrist");
  CHECK(wrist["visible"] == false);
  CHECK_FALSE(wrist.contains("x"));
  CHECK_FALSE(wrist.contains("y"));
  CHECK(j["poses"][0]["joints"][0]["x"] == 0.0);
}

TEST_CASE("canonical round trip on 1000 random documents") {
  skeleform::Rng rng(21);
  for (int n = 0; n < 1000; ++n) {
    const PoseDocument doc = random_document(rng);
    const PoseDocument back = parse_canonical(write_pose(doc));
    REQUIRE(back == doc);
  }
}

TEST_CASE("canonical round trip of arbitrary decimals is within 1e-6") {
  skeleform::Rng rng(22);
  for (int n = 0; n < 200; ++n) {
    PoseDocument doc{{skeleform::test::random_pose(rng)}, {}, {}};
    const PoseDocument back = parse_canonical(write_pose(doc));
    CHECK(skeleform::test::max_rel_diff(back.poses[0], doc.poses[0]) <= 5e-7);
    CHECK(parse_canonical(write_pose(back)) == back);
  }
}

TEST_CASE("parse_canonical versions and forward compatibility") {
  CHECK(code_of([] { parse_canonical(R"({"version":2,"poses":[]})"); }) == ErrorCode::schema);
  CHECK(code_of([] { parse_canonical(R"({"poses":[]})"); }) == ErrorCode::schema);
  nlohmann::json j = nlohmann::json::parse(write_pose(PoseDocument{{KeypointSet{}}, "x", {}}));
  j["extra"] = {1, 2, 3};
  j["poses"][0]["note"] = "hello";
  j["poses"][0]["joints"][3]["confidence"] = 0.4;
  const PoseDocument doc = parse_canonical(j.dump());
  CHECK(doc.poses.size() == 1);
  CHECK(doc.source == "x");
}

TEST_CASE("parse_canonical rejects bad joints") {
  auto base = nlohmann::json::parse(write_pose(PoseDocument{{KeypointSet{}}, {}, {}}));
  auto bad_name = base;
  bad_name["poses"][0]["joints"][4]["name"] = "tail";
  CHECK(code_of([&] { parse_canonical(bad_name.dump()); }) == ErrorCode::schema);
  auto short_list = base;
  short_list["poses"][0]["joints"].erase(0);
  CHECK(code_of([&] { parse_canonical(short_list.dump()); }) == ErrorCode::schema);
  auto missing_x = base;
  missing_x["poses"][0]["joints"][2]["visible"] = true;
  try {
    parse_canonical(missing_x.dump());
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    CHECK(e.path() == "poses[0].joints[2].x");
  }
}

TEST_CASE("parse_any accepts both formats") {
  std::vector<double> kp(54, 1.0);
  CHECK(parse_any(openpose_person(kp)).poses.size() == 1);
  CHECK(parse_any(R"({"version":1,"poses":[]})").poses.empty());
}

TEST_CASE("parsers never crash on random bytes") {
  skeleform::Rng rng(23);
  const std::string alphabet = "{}[]\":,0123456789.eE-+ truefalsnpeoplversionjoints\\\x01\xff";
  for (int n = 0; n < 2000; ++n) {
    std::string s(rng.index(80), '\0');
    for (char& c : s) c = n % 2 ? static_cast<char>(rng.index(256)) : alphabet[rng.index(alphabet.size())];
    for (auto* f : {&parse_openpose, &parse_any}) {
      try {
        f(s, 0.0);
      } catch (const Error&) {
      }
    }
    try {
      parse_canonical(s);
    } catch (const Error&) {
    }
  }
}

TEST_CASE("load_dataset") {
  TempDir dir("dataset");
  SUBCASE("empty directory") { CHECK(load_dataset(dir.path).poses.empty()); }
  SUBCASE("sorted by filename with a corrupt file") {
    skeleform::Rng rng(24);
    std::vector<KeypointSet> poses;
    for (const char* name : {"c.json", "a.json", "b.json"}) {
      poses.push_back(skeleform::test::random_pose(rng));
      for (auto& p : poses.back().points) p = {std::round(p.x), std::round(p.y)};
      write_file(dir.path / name, write_pose(PoseDocument{{poses.back()}, {}, {}}));
    }
    write_file(dir.path / "bb.json", "{not json");
    const Dataset ds = load_dataset(dir.path);
    REQUIRE(ds.poses.size() == 3);
    CHECK(ds.poses[0] == poses[1]);
    CHECK(ds.poses[1] == poses[2]);
    CHECK(ds.poses[2] == poses[0]);
    REQUIRE(ds.warnings.size() == 1);
    CHECK(ds.warnings[0].file.filename() == "bb.json");
  }
  SUBCASE("openpose files") {
    write_file(dir.path / "x.json", openpose_person(std::vector<double>(54, 2.0)));
    CHECK(load_dataset(dir.path).poses.size() == 1);
  }
  SUBCASE("missing directory") {
    CHECK(code_of([&] { load_dataset(dir.path / "nope"); }) == ErrorCode::io);
  }
}

TEST_CASE("render_svg") {
  SUBCASE("two linked joints") {
    KeypointSet k;
    k.visible[kNeck] = true;
    k.visible[r_shoulder] = true;
    k.points[kNeck] = {10, 10};
    k.points[r_shoulder] = {20, 12};
    const std::string svg = render_svg({{k, SvgStyle{}}}, 100, 100);
    CHECK(count(svg, "<circle") == 2);
    CHECK(count(svg, "<line") == 1);
  }
  SUBCASE("two unlinked joints") {
    KeypointSet k;
    k.visible[r_wrist] = true;
    k.visible[l_ankle] = true;
    const std::string svg = render_svg({{k, SvgStyle{}}}, 100, 100);
    CHECK(count(svg, "<circle") == 2);
    CHECK(count(svg, "<line") == 0);
  }
  SUBCASE("empty list") {
    const std::string svg = render_svg({}, 64, 32);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "<circle") == 0);
    CHECK(count(svg, "<line") == 0);
  }
  SUBCASE("full pose counts and determinism") {
    skeleform::Rng rng(25);
    const KeypointSet k = skeleform::test::random_pose(rng);
    const std::vector<std::pair<KeypointSet, SvgStyle>> in{{k, default_style(0)}, {k, default_style(1)}};
    const std::string a = render_svg(in, 512, 512);
    CHECK(a == render_svg(in, 512, 512));
    CHECK(count(a, "<circle") == 36);
    CHECK(count(a, "<line") == 34);
  }
  SUBCASE("opacity is clamped") {
    SvgStyle s;
    s.opacity = 3.0;
    KeypointSet k;
    k.visible[0] = true;
    CHECK(render_svg({{k, s}}, 10, 10).find("opacity=\"1\"") != std::string::npos);
  }
}
