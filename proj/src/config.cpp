#include "minaret/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

namespace minaret {
namespace {

using nlohmann::json;

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

std::string env_name(const std::string& dotted) {
  std::string out;
  for (char c : dotted) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

struct Key {
  const char* name;
  std::function<void(EngineConfig&, const json&)> apply;
};

void set_double(double& field, const json& v, const char* key) {
  if (v.is_number())
    field = v.get<double>();
  else if (v.is_string())
    field = std::stod(v.get<std::string>());
  else
    throw ConfigError(std::string("config key '") + key + "' is not numeric");
}

void set_int(int& field, const json& v, const char* key) {
  if (v.is_number())
    field = static_cast<int>(std::llround(v.get<double>()));
  else if (v.is_string())
    field = std::stoi(v.get<std::string>());
  else
    throw ConfigError(std::string("config key '") + key + "' is not numeric");
}

void set_string(std::string& field, const json& v, const char*) {
  field = v.is_string() ? v.get<std::string>() : v.dump();
}

const std::vector<Key>& known_keys() {
  static const std::vector<Key> keys = {
      {"greeting.temperature", [](EngineConfig& c, const json& v) { set_double(c.greeting_temperature, v, "greeting.temperature"); }},
      {"greeting.max_tokens", [](EngineConfig& c, const json& v) { set_int(c.greeting_max_tokens, v, "greeting.max_tokens"); }},
      {"general.temperature", [](EngineConfig& c, const json& v) { set_double(c.general_temperature, v, "general.temperature"); }},
      {"fiqh.temperature", [](EngineConfig& c, const json& v) { set_double(c.fiqh_temperature, v, "fiqh.temperature"); }},
      {"fiqh.max_tokens", [](EngineConfig& c, const json& v) { set_int(c.fiqh_max_tokens, v, "fiqh.max_tokens"); }},
      {"nl2sql.temperature", [](EngineConfig& c, const json& v) { set_double(c.nl2sql_temperature, v, "nl2sql.temperature"); }},
      {"max_sources", [](EngineConfig& c, const json& v) { set_int(c.max_sources, v, "max_sources"); }},
      {"provider.endpoint", [](EngineConfig& c, const json& v) { set_string(c.provider_endpoint, v, "provider.endpoint"); }},
      {"provider.key", [](EngineConfig& c, const json& v) { set_string(c.provider_key, v, "provider.key"); }},
  };
  return keys;
}

void clamp_ranges(EngineConfig& c) {
  c.greeting_temperature = clampd(c.greeting_temperature, 0.0, 1.0);
  c.general_temperature = clampd(c.general_temperature, 0.0, 1.0);
  c.fiqh_temperature = clampd(c.fiqh_temperature, 0.0, 1.0);
  c.nl2sql_temperature = clampd(c.nl2sql_temperature, 0.0, 0.5);
  c.greeting_max_tokens = clampi(c.greeting_max_tokens, 50, 1000);
  c.fiqh_max_tokens = clampi(c.fiqh_max_tokens, 2000, 12000);
  c.max_sources = clampi(c.max_sources, 5, 50);
}

}  // namespace

EngineConfig load_config(const std::optional<std::string>& db_json,
                         const std::map<std::string, std::string>& env,
                         ExecutionTrace* trace) {
  EngineConfig cfg;  // hardcoded defaults

  // Environment layer.
  for (const auto& key : known_keys()) {
    auto it = env.find(env_name(key.name));
    if (it == env.end()) continue;
    try {
      key.apply(cfg, json(it->second));
    } catch (const std::exception&) {
      throw ConfigError(std::string("environment value for '") + key.name + "' is not valid");
    }
  }

  // Database JSON layer wins over env.
  if (db_json) {
    json doc;
    try {
      doc = json::parse(*db_json);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("unparseable config document: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document is not a JSON object");
    for (const auto& [k, v] : doc.items()) {
      const Key* match = nullptr;
      for (const auto& key : known_keys())
        if (k == key.name) { match = &key; break; }
      if (!match) {
        if (trace) trace->warn("ignoring unknown config key '" + k + "'");
        continue;
      }
      try {
        match->apply(cfg, v);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        throw ConfigError(std::string("config key '") + k + "' has an invalid value");
      }
    }
  }

  clamp_ranges(cfg);
  return cfg;
}

}  // namespace minaret
