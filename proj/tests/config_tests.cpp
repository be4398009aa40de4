#include <doctest.h>

#include "minaret/config.hpp"

using namespace minaret;

TEST_CASE("defaults with no sources") {
  EngineConfig c = load_config(std::nullopt, {});
  CHECK(c.greeting_temperature == 0.2);
  CHECK(c.greeting_max_tokens == 256);
  CHECK(c.general_temperature == 0.1);
  CHECK(c.fiqh_temperature == 0.1);
  CHECK(c.fiqh_max_tokens == 4500);
  CHECK(c.nl2sql_temperature == 0.1);
  CHECK(c.max_sources == 12);
}

TEST_CASE("clamping at every boundary") {
  struct IntCase { const char* key; int lo; int hi; };
  const IntCase int_cases[] = {
      {"greeting.max_tokens", 50, 1000},
      {"fiqh.max_tokens", 2000, 12000},
      {"max_sources", 5, 50},
  };
  for (const auto& tc : int_cases) {
    CAPTURE(tc.key);
    auto get = [&](const EngineConfig& c) {
      if (std::string(tc.key) == "greeting.max_tokens") return c.greeting_max_tokens;
      if (std::string(tc.key) == "fiqh.max_tokens") return c.fiqh_max_tokens;
      return c.max_sources;
    };
    auto with = [&](int v) {
      return load_config("{\"" + std::string(tc.key) + "\": " + std::to_string(v) + "}", {});
    };
    CHECK(get(with(tc.lo - 1)) == tc.lo);   // below range clamps up
    CHECK(get(with(tc.lo)) == tc.lo);       // boundary kept
    CHECK(get(with(tc.hi)) == tc.hi);
    CHECK(get(with(tc.hi + 1)) == tc.hi);   // above range clamps down
  }

  struct DblCase { const char* key; double lo; double hi; };
  const DblCase dbl_cases[] = {
      {"greeting.temperature", 0.0, 1.0},
      {"general.temperature", 0.0, 1.0},
      {"fiqh.temperature", 0.0, 1.0},
      {"nl2sql.temperature", 0.0, 0.5},
  };
  for (const auto& tc : dbl_cases) {
    CAPTURE(tc.key);
    auto get = [&](const EngineConfig& c) {
      std::string k = tc.key;
      if (k == "greeting.temperature") return c.greeting_temperature;
      if (k == "general.temperature") return c.general_temperature;
      if (k == "fiqh.temperature") return c.fiqh_temperature;
      return c.nl2sql_temperature;
    };
    auto with = [&](double v) {
      return load_config("{\"" + std::string(tc.key) + "\": " + std::to_string(v) + "}", {});
    };
    CHECK(get(with(tc.lo - 0.5)) == tc.lo);
    CHECK(get(with(tc.lo)) == tc.lo);
    CHECK(get(with(tc.hi)) == tc.hi);
    CHECK(get(with(tc.hi + 0.5)) == tc.hi);
  }
}

TEST_CASE("precedence db_json > env > defaults, per key") {
  std::map<std::string, std::string> env{
      {"FIQH_MAX_TOKENS", "3000"},
      {"MAX_SOURCES", "20"},
  };
  EngineConfig c = load_config("{\"max_sources\": 30}", env);
  CHECK(c.max_sources == 30);      // db wins over env
  CHECK(c.fiqh_max_tokens == 3000);  // env wins over default
  CHECK(c.greeting_max_tokens == 256);  // untouched default
}

TEST_CASE("env values clamp like any other source") {
  EngineConfig c = load_config(std::nullopt, {{"FIQH_MAX_TOKENS", "15000"}});
  CHECK(c.fiqh_max_tokens == 12000);
}

TEST_CASE("unknown db key is ignored with a warning") {
  ExecutionTrace trace;
  EngineConfig c = load_config("{\"mystery_knob\": 7}", {}, &trace);
  CHECK(c == load_config(std::nullopt, {}));
  bool warned = false;
  for (const auto& e : trace.entries())
    if (e.stage == "warning" && e.detail.find("mystery_knob") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("unparseable document raises ConfigError") {
  CHECK_THROWS_AS(load_config("{not json", {}), ConfigError);
  CHECK_THROWS_AS(load_config("[1,2]", {}), ConfigError);
  CHECK_THROWS_AS(load_config("{\"max_sources\": \"lots\"}", {}), ConfigError);
}

TEST_CASE("clamping is idempotent") {
  EngineConfig once = load_config("{\"fiqh.max_tokens\": 99999, \"nl2sql.temperature\": 0.9}", {});
  std::string again = "{\"fiqh.max_tokens\": " + std::to_string(once.fiqh_max_tokens) +
                      ", \"nl2sql.temperature\": " + std::to_string(once.nl2sql_temperature) + "}";
  EngineConfig twice = load_config(again, {});
  CHECK(once.fiqh_max_tokens == twice.fiqh_max_tokens);
  CHECK(once.nl2sql_temperature == doctest::Approx(twice.nl2sql_temperature));
}
