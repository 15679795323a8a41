#pragma once

#include "consortium/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace consortium {

/// Malformed parameter text: bad syntax, unknown or duplicate key, bad number.
class ParamsFormatError : public std::runtime_error {
public:
  ParamsFormatError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Parses `key = value` lines (UTF-8, `#` starts a comment) on top of the
/// default constants. Keys are the ModelParams field names. Unknown keys are
/// an error; the result is validated.
ModelParams parse_params(std::string_view text);

ModelParams load_params_file(const std::filesystem::path& path);

/// Inverse of parse_params: every field, one per line, shortest round-trip digits.
std::string format_params(const ModelParams& params);

} // namespace consortium
