#include "minaret/http_server.hpp"

#include "minaret/json_io.hpp"
#include "minaret/quran.hpp"

namespace minaret {
namespace {

using nlohmann::json;

std::string request_id_of(const httplib::Request& req, const json& body) {
  if (body.is_object() && body.contains("request_id") && body["request_id"].is_string())
    return body["request_id"];
  return req.get_header_value("X-Request-Id");
}

void reply(httplib::Response& res, int status, json body, const std::string& request_id) {
  if (!request_id.empty()) {
    body["request_id"] = request_id;
    res.set_header("X-Request-Id", request_id);
  }
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json error_payload(const std::string& message, const std::string& route,
                   const std::string& stage, const ExecutionTrace* trace = nullptr) {
  json j;
  j["error"] = message;
  j["route"] = route;
  j["stage"] = stage;
  if (trace) j["trace"] = trace_to_json(*trace);
  return j;
}

// Parse the body, run the handler, and map exceptions to structured
// payloads: validation faults are 400, everything else 500.
template <typename Fn>
void guarded(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  json body;
  if (!req.body.empty()) {
    body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded()) {
      reply(res, 400, error_payload("request body is not valid JSON", "transport", "parse"),
            req.get_header_value("X-Request-Id"));
      return;
    }
  }
  std::string rid = request_id_of(req, body);
  try {
    json out = fn(body);
    reply(res, 200, std::move(out), rid);
  } catch (const EngineError& e) {
    reply(res, e.validation ? 400 : 500, error_payload(e.what(), e.route, e.stage), rid);
  } catch (const std::exception& e) {
    reply(res, 500, error_payload(e.what(), "transport", "handler"), rid);
  }
}

AskRequest ask_request_from(const json& body) {
  AskRequest r;
  if (!body.is_object() || !body.contains("query") || !body["query"].is_string())
    throw EngineError("transport", "validate", "a string \"query\" field is required", true);
  r.query = body["query"];
  if (body.contains("language")) r.language = body["language"].get<std::string>();
  if (body.contains("location")) r.location = body["location"].get<std::string>();
  if (body.contains("method")) r.method = body["method"].get<std::string>();
  if (body.contains("policy")) {
    auto p = parse_policy(body["policy"].get<std::string>());
    if (!p)
      throw EngineError("transport", "validate", "policy must be hanafi or jumhur", true);
    r.policy = p;
  }
  return r;
}

}  // namespace

HttpService::HttpService(const Engine& engine) : engine_(engine) { register_routes(); }

bool HttpService::listen(const std::string& host, int port) {
  return server_.listen(host, port);
}

void HttpService::register_routes() {
  server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  server_.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(req, res, [this](const json& body) {
      return response_to_json(engine_.ask(ask_request_from(body)));
    });
  });

  server_.Post("/route", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(req, res, [this](const json& body) {
      AskRequest r = ask_request_from(body);
      ExecutionTrace trace;
      auto decision = engine_.router().classify(r.query, trace);
      json out = decision_to_json(decision);
      out["trace"] = trace_to_json(trace);
      return out;
    });
  });

  auto intent_endpoint = [this](const char* path, IntentLabel intent) {
    server_.Post(path, [this, intent](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [this, intent](const json& body) {
        return response_to_json(engine_.answer_intent(ask_request_from(body), intent));
      });
    });
  };
  intent_endpoint("/quran", IntentLabel::quran_retrieval);
  intent_endpoint("/dua", IntentLabel::dua_lookup);
  intent_endpoint("/calendar", IntentLabel::islamic_calendar);
  intent_endpoint("/prayer-times", IntentLabel::prayer_times);

  server_.Post("/qibla", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(req, res, [this](const json& body) -> json {
      ExecutionTrace trace;
      GeoPoint p;
      if (body.is_object() && body.contains("latitude") && body.contains("longitude")) {
        p.latitude = body["latitude"].get<double>();
        p.longitude = body["longitude"].get<double>();
        trace.add("qibla", "explicit coordinates");
      } else if (body.is_object() && body.contains("location")) {
        auto loc = resolve_location(body["location"].get<std::string>(), engine_.cities(),
                                    engine_.options().generator, engine_.options().geocoder,
                                    trace);
        p = loc.point;
      } else {
        throw EngineError("tool", "validate",
                          "provide latitude/longitude or a location name", true);
      }
      try {
        auto q = qibla(p);
        json out;
        out["bearing_deg"] = q.bearing_deg;
        out["distance_km"] = q.distance_km;
        out["trace"] = trace_to_json(trace);
        return out;
      } catch (const PrayerError& e) {
        throw EngineError("tool", "qibla", e.what(), true);
      }
    });
  });

  server_.Post("/zakat", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(req, res, [this](const json& body) -> json {
      ExecutionTrace trace;
      if (body.is_object() && body.contains("query")) {
        return response_to_json(
            engine_.answer_intent(ask_request_from(body), IntentLabel::zakat_calculation));
      }
      if (!body.is_object() || !body.contains("assets"))
        throw EngineError("calculation", "validate",
                          "provide either \"query\" or an \"assets\" object", true);
      try {
        ZakatAssets assets;
        const json& a = body["assets"];
        assets.cash = a.value("cash_cents", 0LL);
        assets.gold_milligrams = a.value("gold_milligrams", 0LL);
        assets.silver_milligrams = a.value("silver_milligrams", 0LL);
        assets.business = a.value("business_cents", 0LL);
        assets.stocks = a.value("stocks_cents", 0LL);
        if (a.contains("produce"))
          for (const auto& p : a["produce"])
            assets.produce.push_back(
                {p.value("kind", "produce"), p.at("kilograms").get<double>(),
                 p.value("irrigation", "natural") == "artificial" ? Irrigation::artificial
                                                                  : Irrigation::natural});
        if (a.contains("livestock"))
          for (const auto& l : a["livestock"]) {
            auto sp = parse_species(l.at("species").get<std::string>());
            if (!sp)
              throw EngineError("calculation", "validate", "unknown livestock species", true);
            assets.livestock.push_back({*sp, l.at("head_count").get<long long>()});
          }
        MetalPrices prices = engine_.options().metal_prices;
        if (body.contains("prices")) {
          prices.gold_per_gram = body["prices"].value("gold_per_gram_cents", prices.gold_per_gram);
          prices.silver_per_gram =
              body["prices"].value("silver_per_gram_cents", prices.silver_per_gram);
        }
        auto b = compute_zakat(assets, body.value("liabilities_cents", 0LL), prices);
        json out = breakdown_to_json(b);
        trace.add("zakat", "structured computation");
        out["trace"] = trace_to_json(trace);
        return out;
      } catch (const EngineError&) {
        throw;
      } catch (const ZakatError& e) {
        throw EngineError("calculation", "zakat", e.what(), true);
      }
    });
  });

  server_.Post("/inheritance", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(req, res, [this](const json& body) -> json {
      if (body.is_object() && body.contains("query"))
        return response_to_json(engine_.answer_intent(ask_request_from(body),
                                                      IntentLabel::inheritance_calculation));
      if (!body.is_object() || !body.contains("heirs"))
        throw EngineError("calculation", "validate",
                          "provide either \"query\" or a \"heirs\" object", true);
      Estate estate;
      for (const auto& [name, count] : body["heirs"].items()) {
        auto kind = parse_heir_kind(name);
        if (!kind)
          throw EngineError("calculation", "validate", "unknown heir kind: " + name, true);
        estate.heirs[*kind] = count.get<int>();
      }
      estate.net_estate_cents = body.value("estate_cents", 0LL);
      std::optional<MadhhabPolicy> policy;
      if (body.contains("policy")) {
        policy = parse_policy(body["policy"].get<std::string>());
        if (!policy)
          throw EngineError("calculation", "validate", "policy must be hanafi or jumhur", true);
      }
      try {
        auto outcomes = distribute(estate, policy);
        ExecutionTrace trace;
        trace.add("inheritance", std::to_string(outcomes.size()) + " outcome(s)");
        json arr = json::array();
        for (const auto& o : outcomes) arr.push_back(outcome_to_json(o));
        json out;
        out["outcomes"] = arr;
        out["trace"] = trace_to_json(trace);
        return out;
      } catch (const FaraidError& e) {
        throw EngineError("calculation", "inheritance", e.what(), true);
      }
    });
  });
}

}  // namespace minaret
