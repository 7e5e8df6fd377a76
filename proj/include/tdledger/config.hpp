#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tdledger/ingest.hpp"
#include "tdledger/prioritize.hpp"

namespace tdledger {

// Everything a report depends on besides the tickets themselves.
struct LedgerConfig {
  CostConstants constants;
  QuadrantConfig quadrants;
  RequiredDeliberation deliberation = default_required_deliberation();
  bool enable_v8 = false;  // the team dropped V8 from its dashboard
  double v4_default_horizon_months = 36;
  std::size_t v3_limit = 20;

  // Embedded verbatim in every dataset payload.
  nlohmann::json to_json() const {
    nlohmann::json delib = nlohmann::json::array();
    for (auto f : deliberation) delib.push_back(std::string(to_string(f)));
    return {{"constants", constants.to_json()},
            {"quadrants", quadrants.to_json()},
            {"deliberation_required", delib},
            {"enable_v8", enable_v8},
            {"v4_default_horizon_months", v4_default_horizon_months},
            {"v3_limit", v3_limit}};
  }

  static LedgerConfig from_json(const nlohmann::json& j) {
    LedgerConfig c;
    if (j.contains("constants")) c.constants = CostConstants::from_json(j.at("constants"));
    if (j.contains("quadrants")) c.quadrants = QuadrantConfig::from_json(j.at("quadrants"));
    if (j.contains("deliberation_required")) {
      c.deliberation.clear();
      for (const auto& f : j.at("deliberation_required")) {
        c.deliberation.insert(deliberation_field_from_string(f.get<std::string>()));
      }
    }
    c.enable_v8 = j.value("enable_v8", c.enable_v8);
    c.v4_default_horizon_months = j.value("v4_default_horizon_months", c.v4_default_horizon_months);
    c.v3_limit = j.value("v3_limit", c.v3_limit);
    return c;
  }
};

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::parse_error, path.string() + ": " + e.what());
  }
}

inline LedgerConfig load_config(const std::filesystem::path& path) {
  try {
    return LedgerConfig::from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::parse_error, path.string() + ": " + e.what());
  }
}

// Resolution order: explicit path, then TD_LEDGER_CONFIG, then defaults.
inline LedgerConfig resolve_config(const std::optional<std::string>& path) {
  if (path && !path->empty()) return load_config(*path);
  if (const char* env = std::getenv("TD_LEDGER_CONFIG"); env && *env) return load_config(env);
  return {};
}

}  // namespace tdledger
