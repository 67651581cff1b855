#include "skeleform/service.hpp"

#include <iostream>

#include <httplib.h>

#include "skeleform/completion.hpp"
#include "skeleform/deform.hpp"
#include "skeleform/factor_model.hpp"
#include "skeleform/json_util.hpp"
#include "skeleform/pose_io.hpp"
#include "skeleform/svg.hpp"

namespace skeleform {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::string_view kVersion = "0.1.0";

PoseDocument document_from(const json& j, const std::string& path, double threshold) {
  if (j.is_object() && j.contains("version")) return pose_document_from_json(j, path);
  if (j.is_object() && j.contains("people")) return parse_openpose(j.dump(), threshold);
  if (j.is_object() && j.contains("joints")) return PoseDocument{{pose_from_json(j, path)}, {}, {}};
  throw Error(ErrorCode::schema, "expected a pose document or a pose object", path.empty() ? "$" : path);
}

KeypointSet single_pose(const json& j, const std::string& path, double threshold) {
  PoseDocument doc = document_from(j, path, threshold);
  if (doc.poses.empty()) throw Error(ErrorCode::schema, "document holds no pose", path.empty() ? "poses" : path);
  return doc.poses.front();
}

ojson factors_json(const GroupFactors& f) {
  ojson arr = ojson::array();
  for (double v : f.values()) arr.push_back(v);
  return arr;
}

ojson group_names() {
  ojson names = ojson::array();
  for (std::size_t g = 0; g < kNumGroups; ++g) names.push_back(group_name(static_cast<GroupId>(g)));
  return names;
}

ApiCode api_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return ApiCode::parse;
    case ErrorCode::schema:
    case ErrorCode::version:
    case ErrorCode::shape:
    case ErrorCode::invalid_argument:
    case ErrorCode::empty_dataset: return ApiCode::schema;
    case ErrorCode::missing_joint: return ApiCode::missing_joint;
    case ErrorCode::invalid_factors: return ApiCode::invalid_factors;
    case ErrorCode::model_missing: return ApiCode::model_missing;
    case ErrorCode::io:
    case ErrorCode::internal: return ApiCode::internal;
  }
  return ApiCode::internal;
}

MlpModel load_kind(const std::filesystem::path& path, ModelKind kind) {
  MlpModel m = load_model(read_file(path));
  if (m.kind() != kind)
    throw Error(ErrorCode::schema, path.string() + " holds a " + std::string(to_string(m.kind())) + " model, expected " +
                                       std::string(to_string(kind)),
                "kind");
  return m;
}

}  // namespace

std::string_view to_string(ApiCode code) {
  switch (code) {
    case ApiCode::parse: return "parse";
    case ApiCode::schema: return "schema";
    case ApiCode::missing_joint: return "missing_joint";
    case ApiCode::invalid_factors: return "invalid_factors";
    case ApiCode::model_missing: return "model_missing";
    case ApiCode::internal: return "internal";
  }
  return "internal";
}

ApiError ApiError::from(const Error& e) { return {api_code(e.code()), e.what(), e.path()}; }

ojson ApiError::to_json() const {
  ojson err;
  err["code"] = to_string(code);
  err["message"] = message;
  err["path"] = path;
  ojson out;
  out["error"] = std::move(err);
  return out;
}

Service::Service(std::optional<MlpModel> factor, std::optional<MlpModel> completion, double confidence_threshold)
    : factor_(std::move(factor)), completion_(std::move(completion)), confidence_threshold_(confidence_threshold) {
  if (factor_ && (factor_->input_size() != kPoseEncodingSize || factor_->output_size() != kNumGroups))
    throw Error(ErrorCode::shape, "factor model must map 54 inputs to 6 outputs");
  if (completion_ && (completion_->input_size() != kPoseEncodingSize || completion_->output_size() != 2 * kNumJoints))
    throw Error(ErrorCode::shape, "completion model must map 54 inputs to 36 outputs");
}

Service Service::from_config(const AppConfig& config) {
  std::optional<MlpModel> factor;
  std::optional<MlpModel> completion;
  if (config.factor_model) factor = load_kind(*config.factor_model, ModelKind::factor);
  if (config.completion_model) completion = load_kind(*config.completion_model, ModelKind::completion);
  return Service(std::move(factor), std::move(completion), config.confidence_threshold);
}

ojson Service::health() const {
  ojson out;
  out["version"] = kVersion;
  ojson models = ojson::array();
  if (factor_) models.push_back("factor");
  if (completion_) models.push_back("completion");
  out["models"] = std::move(models);
  return out;
}

ojson Service::complete(const json& request) const {
  PoseDocument doc = document_from(request, "", confidence_threshold_);
  for (std::size_t i = 0; i < doc.poses.size(); ++i) {
    if (doc.poses[i].fully_visible()) continue;
    if (!completion_) throw Error(ErrorCode::model_missing, "no completion model loaded");
    doc.poses[i] = complete_pose(*completion_, doc.poses[i]);
  }
  return pose_document_to_json(doc);
}

ojson Service::factors(const json& request) const {
  if (!factor_) throw Error(ErrorCode::model_missing, "no factor model loaded");
  const KeypointSet k = single_pose(request, "", confidence_threshold_);
  ojson out;
  out["groups"] = group_names();
  out["factors"] = factors_json(predict_factors(*factor_, k));
  return out;
}

ojson Service::deform(const json& request) const {
  if (!request.is_object()) throw Error(ErrorCode::schema, "request must be an object", "$");
  if (!request.contains("person")) throw Error(ErrorCode::schema, "missing 'person'", "person");
  bool naive = false;
  if (const auto it = request.find("naive"); it != request.end() && !it->is_null()) {
    if (!it->is_boolean()) throw Error(ErrorCode::schema, "'naive' must be a boolean", "naive");
    naive = it->get<bool>();
  }
  const bool has_art = request.contains("art") && !request["art"].is_null();
  const bool has_tau = request.contains("tau_a") && !request["tau_a"].is_null();

  const auto completed = [&](KeypointSet k) {
    if (!k.fully_visible() && completion_) k = complete_pose(*completion_, k);
    return k;
  };
  const KeypointSet person = completed(single_pose(request["person"], "person", confidence_threshold_));

  ojson out;
  if (naive) {
    if (!has_art) throw Error(ErrorCode::schema, "naive deformation needs an 'art' pose", "art");
    const KeypointSet art = completed(single_pose(request["art"], "art", confidence_threshold_));
    out = pose_document_to_json(PoseDocument{{deform_naive(person, art)}, "deform:naive", {}});
    out["mode"] = "naive";
    return out;
  }

  if (!factor_) throw Error(ErrorCode::model_missing, "learned deformation needs a factor model");
  GroupFactors tau_a;
  if (has_tau) {
    const json& t = request["tau_a"];
    if (!t.is_array() || t.size() != kNumGroups) throw Error(ErrorCode::schema, "tau_a must hold 6 numbers", "tau_a");
    std::array<double, kNumGroups> v{};
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      if (!t[g].is_number()) throw Error(ErrorCode::schema, "tau_a entries must be numbers", "tau_a[" + std::to_string(g) + "]");
      v[g] = t[g].get<double>();
    }
    tau_a = GroupFactors(v);
  } else if (has_art) {
    tau_a = predict_factors(*factor_, single_pose(request["art"], "art", confidence_threshold_));
  } else {
    throw Error(ErrorCode::schema, "learned deformation needs 'art' or 'tau_a'", "tau_a");
  }
  const GroupFactors tau_p = predict_factors(*factor_, person);
  out = pose_document_to_json(PoseDocument{{skeleform::deform(person, tau_p, tau_a)}, "deform:learned", {}});
  out["mode"] = "learned";
  out["groups"] = group_names();
  out["tau_p"] = factors_json(tau_p);
  out["tau_a"] = factors_json(tau_a);
  return out;
}

std::string Service::render(const json& request) const {
  const PoseDocument doc = document_from(request, "", confidence_threshold_);
  double width = 512.0, height = 512.0;
  if (doc.image_size) std::tie(width, height) = *doc.image_size;
  if (const auto c = request.find("canvas"); c != request.end()) {
    if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() || !(*c)[1].is_number())
      throw Error(ErrorCode::schema, "canvas must be [width, height]", "canvas");
    width = (*c)[0].get<double>();
    height = (*c)[1].get<double>();
  }
  const json* styles = nullptr;
  if (const auto s = request.find("styles"); s != request.end()) {
    if (!s->is_array()) throw Error(ErrorCode::schema, "styles must be an array", "styles");
    styles = &*s;
  }
  std::vector<std::pair<KeypointSet, SvgStyle>> layers;
  for (std::size_t i = 0; i < doc.poses.size(); ++i) {
    SvgStyle style = default_style(i);
    if (styles && i < styles->size()) {
      const json& s = (*styles)[i];
      const std::string sp = "styles[" + std::to_string(i) + "]";
      if (!s.is_object()) throw Error(ErrorCode::schema, "style must be an object", sp);
      if (s.contains("stroke")) {
        if (!s["stroke"].is_string()) throw Error(ErrorCode::schema, "stroke must be a string", sp + ".stroke");
        style.stroke_color = s["stroke"].get<std::string>();
      }
      if (s.contains("radius")) {
        if (!s["radius"].is_number()) throw Error(ErrorCode::schema, "radius must be a number", sp + ".radius");
        style.joint_radius = s["radius"].get<double>();
      }
      if (s.contains("opacity")) {
        if (!s["opacity"].is_number()) throw Error(ErrorCode::schema, "opacity must be a number", sp + ".opacity");
        style.opacity = s["opacity"].get<double>();
        if (!(style.opacity >= 0.0 && style.opacity <= 1.0))
          throw Error(ErrorCode::schema, "opacity must lie in [0, 1]", sp + ".opacity");
      }
    }
    layers.emplace_back(doc.poses[i], std::move(style));
  }
  return render_svg(layers, width, height);
}

Service::Response Service::handle(std::string_view endpoint, std::string_view body) const {
  constexpr const char* kJson = "application/json";
  try {
    if (endpoint == "/api/health") return {200, kJson, health().dump()};
    const json request = parse_json(body);
    if (endpoint == "/api/complete") return {200, kJson, complete(request).dump()};
    if (endpoint == "/api/factors") return {200, kJson, factors(request).dump()};
    if (endpoint == "/api/deform") return {200, kJson, deform(request).dump()};
    if (endpoint == "/api/render.svg") return {200, "image/svg+xml", render(request)};
    throw Error(ErrorCode::schema, "unknown endpoint " + std::string(endpoint));
  } catch (const Error& e) {
    const ApiError err = ApiError::from(e);
    return {err.http_status(), kJson, err.to_json().dump()};
  } catch (const json::exception& e) {
    const ApiError err{ApiCode::schema, e.what(), {}};
    return {err.http_status(), kJson, err.to_json().dump()};
  } catch (const std::exception& e) {
    const ApiError err{ApiCode::internal, e.what(), {}};
    return {err.http_status(), kJson, err.to_json().dump()};
  }
}

void register_routes(httplib::Server& server, const Service& service, const AppConfig& config) {
  const auto respond = [&service, verbose = config.verbosity > 0](const httplib::Request& req, httplib::Response& res) {
    const Service::Response r = service.handle(req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    if (verbose) std::cerr << req.method << ' ' << req.path << " -> " << r.status << '\n';
  };
  server.Get("/api/health", respond);
  for (const char* path : {"/api/complete", "/api/factors", "/api/deform", "/api/render.svg"}) server.Post(path, respond);
  if (config.static_dir) server.set_mount_point("/", config.static_dir->string());
}

bool serve(const AppConfig& config) {
  const Service service = Service::from_config(config);
  httplib::Server server;
  register_routes(server, service, config);
  std::cerr << "skeleform " << kVersion << " listening on " << config.bind << ':' << config.port << '\n';
  return server.listen(config.bind, config.port);
}

}  // namespace skeleform
