#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "skeleform/error.hpp"
#include "skeleform/mlp.hpp"

namespace httplib {
class Server;
}

namespace skeleform {

struct AppConfig {
  std::optional<std::filesystem::path> factor_model;
  std::optional<std::filesystem::path> completion_model;
  double scale_lo = 0.5;
  double scale_hi = 2.0;
  double confidence_threshold = 0.0;
  std::string bind = "127.0.0.1";
  int port = 8080;
  int verbosity = 0;
  std::optional<std::filesystem::path> static_dir;
};

enum class ApiCode { parse, schema, missing_joint, invalid_factors, model_missing, internal };

std::string_view to_string(ApiCode code);

struct ApiError {
  ApiCode code = ApiCode::internal;
  std::string message;
  std::string path;

  static ApiError from(const Error& e);
  /// 500 for internal failures, 400 otherwise.
  int http_status() const { return code == ApiCode::internal ? 500 : 400; }
  nlohmann::ordered_json to_json() const;
};

/// Request handlers shared by the CLI and the HTTP service. Loaded models are
/// immutable, so one instance serves concurrent requests.
class Service {
 public:
  Service() = default;
  Service(std::optional<MlpModel> factor, std::optional<MlpModel> completion, double confidence_threshold = 0.0);

  /// Loads whichever model paths are set. Throws Error on unreadable or
  /// malformed model files, or a model of the wrong kind.
  static Service from_config(const AppConfig& config);

  bool has_factor_model() const { return factor_.has_value(); }
  bool has_completion_model() const { return completion_.has_value(); }

  nlohmann::ordered_json health() const;
  /// Body: pose document (canonical, OpenPose) or a bare {"joints": [...]}.
  nlohmann::ordered_json complete(const nlohmann::json& request) const;
  /// Body: a single pose. Response: {"groups": [...], "factors": [6]}.
  nlohmann::ordered_json factors(const nlohmann::json& request) const;
  /// Body: {"person": pose, "art": pose?, "tau_a": [6]?, "naive": bool?}.
  nlohmann::ordered_json deform(const nlohmann::json& request) const;
  /// Body: pose document plus optional "styles" and "canvas": [w, h].
  std::string render(const nlohmann::json& request) const;

  struct Response {
    int status = 200;
    std::string content_type;
    std::string body;
  };

  /// Dispatches a raw request body to the named endpoint ("/api/deform",
  /// ...). Never throws; failures become ApiError bodies.
  Response handle(std::string_view endpoint, std::string_view body) const;

 private:
  std::optional<MlpModel> factor_;
  std::optional<MlpModel> completion_;
  double confidence_threshold_ = 0.0;
};

/// Registers every endpoint (and the static mount, if configured) on `server`.
void register_routes(httplib::Server& server, const Service& service, const AppConfig& config);

/// Blocks serving HTTP until the process is stopped. Returns false if the
/// address cannot be bound.
bool serve(const AppConfig& config);

}  // namespace skeleform
