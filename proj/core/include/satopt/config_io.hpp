#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "satopt/experiments.hpp"

namespace satopt {

/// Raised by the config readers. `field` is the offending JSON key (empty
/// for syntax errors); `line`/`column` are 1-based and 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { kIo, kParse, kSchema, kValidation };

  ConfigError(Kind kind, const std::string& what, std::string field = {}, int line = 0,
              int column = 0)
      : std::runtime_error(what), kind(kind), field(std::move(field)), line(line), column(column) {}

  Kind kind;
  std::string field;
  int line;
  int column;
};

/// Reads a JSON object whose keys are SystemConfig and ExperimentSpec field
/// names. System fields may sit at top level or inside "base_config".
/// "noise_power_dbw" is accepted in place of "noise_power_w" and converted to
/// watts. Absent fields keep their defaults; unknown keys are rejected.
ExperimentSpec parse_config(const std::filesystem::path& path);
ExperimentSpec parse_config_text(std::string_view text, std::string_view source = "<config>");

/// Canonical JSON (system fields under "base_config", linear units, shortest
/// round-trip numbers). parse_config_text(write_config(s)) == s.
std::string write_config(const ExperimentSpec& spec);
void write_config(const ExperimentSpec& spec, const std::filesystem::path& path);

}  // namespace satopt
