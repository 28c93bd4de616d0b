#include "satopt/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

namespace satopt {

namespace {

using nlohmann::json;
using Kind = ConfigError::Kind;

using SystemField = std::variant<int SystemConfig::*, double SystemConfig::*>;

const std::vector<std::pair<const char*, SystemField>>& system_fields() {
  static const std::vector<std::pair<const char*, SystemField>> fields = {
      {"n_beams", &SystemConfig::n_beams},
      {"n_subcarriers", &SystemConfig::n_subcarriers},
      {"sc_bandwidth_hz", &SystemConfig::sc_bandwidth_hz},
      {"noise_power_w", &SystemConfig::noise_power_w},
      {"p_beam_max_w", &SystemConfig::p_beam_max_w},
      {"p_tot_max_w", &SystemConfig::p_tot_max_w},
      {"fspl_db", &SystemConfig::fspl_db},
      {"rain_mean_db", &SystemConfig::rain_mean_db},
      {"rain_std_db", &SystemConfig::rain_std_db},
      {"user_gain_dbi", &SystemConfig::user_gain_dbi},
      {"g_max_dbi", &SystemConfig::g_max_dbi},
      {"theta_3db_deg", &SystemConfig::theta_3db_deg},
      {"beam_radius_km", &SystemConfig::beam_radius_km},
      {"sat_altitude_km", &SystemConfig::sat_altitude_km},
      {"carrier_ghz", &SystemConfig::carrier_ghz},
      {"weight_w_bps_per_watt", &SystemConfig::weight_w_bps_per_watt},
      {"tolerance_eps", &SystemConfig::tolerance_eps},
      {"max_outer_iters", &SystemConfig::max_outer_iters},
      {"p_floor_w", &SystemConfig::p_floor_w},
      {"acm_zeta", &SystemConfig::acm_zeta},
  };
  return fields;
}

constexpr const char* kNoiseDbw = "noise_power_dbw";

[[noreturn]] void schema_error(const std::string& source, const std::string& field,
                               const std::string& what) {
  throw ConfigError(Kind::kSchema, source + ": field '" + field + "': " + what, field);
}

double as_double(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_number()) schema_error(source, field, "expected a number, got " + std::string(v.type_name()));
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(source, field, "expected a finite number");
  return d;
}

long long as_integer(const json& v, const std::string& source, const std::string& field) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
      schema_error(source, field, "integer out of range");
    }
    return static_cast<long long>(u);
  }
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::trunc(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  schema_error(source, field, "expected an integer, got " + v.dump());
}

int as_int(const json& v, const std::string& source, const std::string& field) {
  const long long x = as_integer(v, source, field);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    schema_error(source, field, "integer out of range");
  }
  return static_cast<int>(x);
}

std::uint64_t as_seed(const json& v, const std::string& source, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long x = as_integer(v, source, field);
  if (x < 0) schema_error(source, field, "seed must be >= 0");
  return static_cast<std::uint64_t>(x);
}

std::vector<double> as_grid(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array()) schema_error(source, field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_double(v[i], source, field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void read_system(const json& obj, const std::string& source, SystemConfig& cfg,
                 std::vector<std::string>& seen) {
  for (const auto& [name, member] : system_fields()) {
    const auto it = obj.find(name);
    if (it == obj.end()) continue;
    seen.emplace_back(name);
    std::visit(
        [&](auto ptr) {
          using T = std::remove_reference_t<decltype(cfg.*ptr)>;
          if constexpr (std::is_same_v<T, int>) {
            cfg.*ptr = as_int(*it, source, name);
          } else {
            cfg.*ptr = as_double(*it, source, name);
          }
        },
        member);
  }
  if (const auto it = obj.find(kNoiseDbw); it != obj.end()) {
    if (obj.contains("noise_power_w")) {
      schema_error(source, kNoiseDbw, "give either noise_power_w or noise_power_dbw, not both");
    }
    seen.emplace_back(kNoiseDbw);
    cfg.noise_power_w = db_to_linear(as_double(*it, source, kNoiseDbw));
  }
}

bool is_system_key(const std::string& key) {
  if (key == kNoiseDbw) return true;
  for (const auto& [name, member] : system_fields()) {
    if (key == name) return true;
  }
  return false;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ExperimentSpec parse_config_text(std::string_view text, std::string_view source_view) {
  const std::string source(source_view);
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::ostringstream os;
    os << source << ":" << line << ":" << column << ": malformed JSON: " << e.what();
    throw ConfigError(Kind::kParse, os.str(), {}, line, column);
  }
  if (!root.is_object()) {
    throw ConfigError(Kind::kSchema, source + ": top level must be a JSON object");
  }

  ExperimentSpec spec;
  std::vector<std::string> system_seen;
  read_system(root, source, spec.base_config, system_seen);
  if (const auto it = root.find("base_config"); it != root.end()) {
    if (!it->is_object()) schema_error(source, "base_config", "expected an object");
    for (const auto& [key, value] : it->items()) {
      if (!is_system_key(key)) schema_error(source, "base_config." + key, "unknown field");
      if (root.contains(key)) {
        schema_error(source, key, "given both at top level and inside base_config");
      }
    }
    read_system(*it, source, spec.base_config, system_seen);
  }

  for (const auto& [key, value] : root.items()) {
    if (key == "base_config" || is_system_key(key)) continue;
    if (key == "n_trials") {
      spec.n_trials = as_int(value, source, key);
    } else if (key == "base_seed") {
      spec.base_seed = as_seed(value, source, key);
    } else if (key == "scene_seed") {
      spec.scene_seed = as_seed(value, source, key);
    } else if (key == "r_bps") {
      spec.r_bps = as_double(value, source, key);
    } else if (key == "r_grid_bps") {
      spec.r_grid_bps = as_grid(value, source, key);
    } else if (key == "w_grid_bps_per_w") {
      spec.w_grid_bps_per_w = as_grid(value, source, key);
    } else if (key == "scheme_w_bps_per_w") {
      spec.scheme_w_bps_per_w = as_grid(value, source, key);
    } else if (key == "starts") {
      if (!value.is_array()) schema_error(source, key, "expected an array of strings");
      spec.starts.clear();
      for (const auto& s : value) {
        if (!s.is_string()) schema_error(source, key, "expected strings like \"mu:0.5\"");
        try {
          spec.starts.push_back(parse_start(s.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          schema_error(source, key, e.what());
        }
      }
    } else {
      schema_error(source, key, "unknown field");
    }
  }

  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(Kind::kValidation, source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Kind::kIo, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string write_config(const ExperimentSpec& spec) {
  json base = json::object();
  for (const auto& [name, member] : system_fields()) {
    std::visit([&](auto ptr) { base[name] = spec.base_config.*ptr; }, member);
  }
  json root = json::object();
  root["base_config"] = base;
  root["n_trials"] = spec.n_trials;
  root["base_seed"] = spec.base_seed;
  root["scene_seed"] = spec.scene_seed;
  root["r_bps"] = spec.r_bps;
  root["r_grid_bps"] = spec.r_grid_bps;
  root["w_grid_bps_per_w"] = spec.w_grid_bps_per_w;
  root["scheme_w_bps_per_w"] = spec.scheme_w_bps_per_w;
  json starts = json::array();
  for (const StartSpec& s : spec.starts) starts.push_back(format_start(s));
  root["starts"] = starts;
  return root.dump(2) + "\n";
}

void write_config(const ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(Kind::kIo, "cannot write config file " + path.string());
  out << write_config(spec);
  if (!out) throw ConfigError(Kind::kIo, "failed writing config file " + path.string());
}

}  // namespace satopt
