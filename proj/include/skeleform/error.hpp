#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skeleform {

enum class ErrorCode {
  parse,             // malformed JSON / bytes
  schema,            // well-formed but wrong structure
  version,           // unsupported format version
  shape,             // tensor / layer shape mismatch
  missing_joint,     // joint required but invisible
  invalid_factors,   // non-positive or non-finite body-ratio factor
  invalid_argument,
  model_missing,
  empty_dataset,
  io,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code and, where relevant, the JSON
/// path or byte offset of the offending input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace skeleform
