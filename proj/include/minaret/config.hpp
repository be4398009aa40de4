#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "minaret/trace.hpp"

namespace minaret {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Engine-wide knobs. Values outside their documented ranges are clamped at
/// load time, never rejected.
struct EngineConfig {
  double greeting_temperature = 0.2;   // [0,1]
  int greeting_max_tokens = 256;       // [50,1000]
  double general_temperature = 0.1;    // [0,1]
  double fiqh_temperature = 0.1;       // [0,1]
  int fiqh_max_tokens = 4500;          // [2000,12000]
  double nl2sql_temperature = 0.1;     // [0,0.5]
  int max_sources = 12;                // [5,50]

  std::string provider_endpoint;
  std::string provider_key;

  bool operator==(const EngineConfig&) const = default;
};

/// Three-tier precedence: db_json > environment > defaults, key by key.
/// Keys are dotted ("fiqh.max_tokens"); the env spelling is uppercased with
/// dots replaced by underscores (FIQH_MAX_TOKENS). Unknown db_json keys are
/// ignored with a trace warning. An unparseable db_json document raises
/// ConfigError naming the offending key.
EngineConfig load_config(const std::optional<std::string>& db_json,
                         const std::map<std::string, std::string>& env,
                         ExecutionTrace* trace = nullptr);

}  // namespace minaret
