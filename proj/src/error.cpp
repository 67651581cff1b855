#include "skeleform/error.hpp"

namespace skeleform {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::schema: return "schema";
    case ErrorCode::version: return "version";
    case ErrorCode::shape: return "shape";
    case ErrorCode::missing_joint: return "missing_joint";
    case ErrorCode::invalid_factors: return "invalid_factors";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::model_missing: return "model_missing";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace skeleform
