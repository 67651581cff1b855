#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "skeleform/error.hpp"

namespace skeleform {

/// Parses JSON text, turning every parser failure (syntax, numeric overflow)
/// into Error(parse). `context` prefixes the message, e.g. a file name.
inline nlohmann::json parse_json(std::string_view text, const std::string& context = {}) {
  const std::string prefix = context.empty() ? "" : context + ": ";
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse, prefix + e.what(), "byte " + std::to_string(e.byte));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, prefix + e.what());
  }
}

}  // namespace skeleform
