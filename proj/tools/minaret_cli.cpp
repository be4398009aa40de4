#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "minaret/engine.hpp"
#include "minaret/http_server.hpp"
#include "minaret/json_io.hpp"

using nlohmann::json;
using namespace minaret;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

struct Runtime {
  StubTextGenerator generator;
  TrigramEmbedder embedder;
  std::unique_ptr<QuranStore> quran;
  std::unique_ptr<DocumentStore> documents;
  std::unique_ptr<DuaStore> duas;
  std::unique_ptr<Engine> engine;
};

// Load whatever stores exist under the data directory; missing files just
// leave the corresponding route degraded, they are not an error.
std::unique_ptr<Runtime> make_runtime(const std::string& data_dir) {
  auto rt = std::make_unique<Runtime>();
  namespace fs = std::filesystem;
  std::string db = data_dir + "/quran.db";
  if (fs::exists(db)) rt->quran = std::make_unique<QuranStore>(db);
  std::string docs = data_dir + "/docs.jsonl";
  if (fs::exists(docs)) {
    rt->documents = std::make_unique<DocumentStore>(&rt->embedder);
    rt->documents->load(docs);
  }
  std::string duas = data_dir + "/duas.jsonl";
  if (fs::exists(duas)) {
    rt->duas = std::make_unique<DuaStore>(&rt->embedder);
    rt->duas->load(duas);
  }
  std::map<std::string, std::string> env;
  for (const char* key : {"GREETING_TEMPERATURE", "GREETING_MAX_TOKENS",
                          "GENERAL_TEMPERATURE", "FIQH_TEMPERATURE", "FIQH_MAX_TOKENS",
                          "NL2SQL_TEMPERATURE", "MAX_SOURCES", "PROVIDER_ENDPOINT",
                          "PROVIDER_KEY"})
    if (const char* v = std::getenv(key)) env[key] = v;
  std::optional<std::string> db_json;
  std::string cfg_path = data_dir + "/config.json";
  if (fs::exists(cfg_path)) {
    std::ifstream in(cfg_path);
    db_json = std::string(std::istreambuf_iterator<char>(in), {});
  }
  EngineOptions opts;
  opts.config = load_config(db_json, env);
  opts.generator = &rt->generator;
  opts.embedder = &rt->embedder;
  opts.quran = rt->quran.get();
  opts.documents = rt->documents.get();
  opts.duas = rt->duas.get();
  rt->engine = std::make_unique<Engine>(std::move(opts));
  return rt;
}

void print_response(const AssembledResponse& r, bool as_json) {
  if (as_json)
    std::cout << response_to_json(r).dump(2) << "\n";
  else
    std::cout << render_with_references(r) << "\n";
}

int run_eval_router(const Runtime& rt, const std::string& path, bool as_json) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return kExitValidation;
  }
  int total = 0, correct = 0;
  std::map<std::string, std::map<std::string, int>> confusion;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string query = line.substr(0, tab);
    std::string gold = line.substr(tab + 1);
    ExecutionTrace trace;
    auto d = rt.engine->router().classify(query, trace);
    std::string pred = to_string(d.intent);
    ++total;
    if (pred == gold) ++correct;
    ++confusion[gold][pred];
  }
  double acc = total ? static_cast<double>(correct) / total : 0.0;
  if (as_json) {
    json j;
    j["total"] = total;
    j["correct"] = correct;
    j["accuracy"] = acc;
    j["confusion"] = confusion;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "accuracy " << correct << "/" << total << " = " << acc << "\n";
    for (const auto& [gold, row] : confusion)
      for (const auto& [pred, n] : row)
        if (gold != pred) std::cout << "  " << gold << " -> " << pred << ": " << n << "\n";
  }
  return kExitOk;
}

int run_eval_nl2sql(const Runtime& rt, const std::string& gold_path,
                    const std::string& pred_path, bool as_json) {
  if (!rt.quran) {
    std::cerr << "eval-nl2sql needs the verse store (run ingest-quran first)\n";
    return kExitValidation;
  }
  auto load_lines = [](const std::string& p) {
    std::vector<std::string> sqls;
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      sqls.push_back(json::parse(line).at("sql").get<std::string>());
    }
    return sqls;
  };
  auto gold = load_lines(gold_path);
  auto pred = load_lines(pred_path);
  if (gold.size() != pred.size()) {
    std::cerr << "gold and prediction files differ in length\n";
    return kExitValidation;
  }
  int correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    try {
      auto g = validate_sql(gold[i]);
      auto p = validate_sql(pred[i]);
      if (denotational_match(p, g, *rt.quran)) ++correct;
    } catch (const SqlRejected&) {
      // invalid prediction counts as incorrect; invalid gold too (conservative)
    }
  }
  double acc = gold.empty() ? 0.0 : static_cast<double>(correct) / gold.size();
  if (as_json) {
    json j;
    j["total"] = gold.size();
    j["correct"] = correct;
    j["accuracy"] = acc;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "denotational accuracy " << correct << "/" << gold.size() << " = " << acc
              << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic Islamic knowledge engine"};
  app.require_subcommand(1);
  bool as_json = false;
  std::string data_dir = "data";
  app.add_flag("--json", as_json, "machine-readable JSON output");
  app.add_option("--data-dir", data_dir, "directory holding the bundled stores");

  std::string query, language, policy_s, location, method, city, date_s;
  double lat = 0, lon = 0;
  int tz_minutes = 0;
  bool has_latlon = false;

  auto* ask = app.add_subcommand("ask", "full pipeline: gate, route, execute");
  ask->add_option("query", query)->required();
  ask->add_option("--language", language);
  ask->add_option("--policy", policy_s);
  ask->add_option("--location", location);
  ask->add_option("--method", method);

  auto* route = app.add_subcommand("route", "classify a query without executing");
  route->add_option("query", query)->required();

  auto* zakat_cmd = app.add_subcommand("zakat", "zakat from a free-text description");
  zakat_cmd->add_option("query", query)->required();

  std::string heirs_s;
  long long estate_cents = 0;
  auto* inherit = app.add_subcommand("inherit", "estate distribution");
  inherit->add_option("--heirs", heirs_s, "e.g. \"husband=1,daughter=2\"")->required();
  inherit->add_option("--estate", estate_cents, "net estate in cents");
  inherit->add_option("--policy", policy_s, "hanafi or jumhur");

  auto* quran_cmd = app.add_subcommand("quran", "verse lookup or statistics");
  quran_cmd->add_option("query", query)->required();

  auto* prayer = app.add_subcommand("prayer", "daily prayer timetable");
  prayer->add_option("--city", city);
  auto* po_lat = prayer->add_option("--lat", lat);
  prayer->add_option("--lon", lon);
  prayer->add_option("--tz-minutes", tz_minutes, "UTC offset in minutes");
  prayer->add_option("--method", method, "MWL, Egyptian, UmmAlQura, or ISNA");
  prayer->add_option("--date", date_s, "YYYY-MM-DD (default today)");

  auto* qibla_cmd = app.add_subcommand("qibla", "bearing to the Kaaba");
  qibla_cmd->add_option("--city", city);
  auto* qo_lat = qibla_cmd->add_option("--lat", lat);
  qibla_cmd->add_option("--lon", lon);

  auto* calendar_cmd = app.add_subcommand("calendar", "Hijri conversions and events");
  calendar_cmd->add_option("query", query)->required();

  auto* dua = app.add_subcommand("dua", "supplication lookup");
  dua->add_option("query", query)->required();

  std::string input_path, output_path;
  auto* ingest_q = app.add_subcommand("ingest-quran", "build the verse store");
  ingest_q->add_option("--input", input_path)->required();
  ingest_q->add_option("--output", output_path)->required();

  auto* ingest_d = app.add_subcommand("ingest-docs", "precompute corpus embeddings");
  ingest_d->add_option("--input", input_path)->required();
  ingest_d->add_option("--output", output_path)->required();

  std::string eval_path, pred_path;
  auto* eval_r = app.add_subcommand("eval-router", "accuracy over a labeled query file");
  eval_r->add_option("file", eval_path)->required();

  auto* eval_n = app.add_subcommand("eval-nl2sql", "denotational accuracy of SQL pairs");
  eval_n->add_option("gold", eval_path)->required();
  eval_n->add_option("pred", pred_path)->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--port", port);
  serve->add_option("--host", host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_q) {
      ingest_quran(input_path, output_path);
      std::cout << "ingested 6236 verses into " << output_path << "\n";
      return kExitOk;
    }
    if (*ingest_d) {
      TrigramEmbedder embedder;
      ingest_docs(input_path, output_path, embedder);
      std::cout << "wrote embedded corpus to " << output_path << "\n";
      return kExitOk;
    }

    auto rt = make_runtime(data_dir);

    std::optional<MadhhabPolicy> policy;
    if (!policy_s.empty()) {
      policy = parse_policy(policy_s);
      if (!policy) {
        std::cerr << "policy must be hanafi or jumhur\n";
        return kExitValidation;
      }
    }

    if (*ask) {
      AskRequest r;
      r.query = query;
      if (!language.empty()) r.language = language;
      if (!location.empty()) r.location = location;
      if (!method.empty()) r.method = method;
      r.policy = policy;
      print_response(rt->engine->ask(r), as_json);
      return kExitOk;
    }
    if (*route) {
      ExecutionTrace trace;
      auto d = rt->engine->router().classify(query, trace);
      if (as_json) {
        json j = decision_to_json(d);
        j["trace"] = trace_to_json(trace);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << to_string(d.intent) << " (" << d.language << ", confidence "
                  << d.confidence << ", " << to_string(route_for(d.intent)) << " route)\n";
      }
      return kExitOk;
    }
    if (*zakat_cmd) {
      AskRequest r;
      r.query = query;
      print_response(rt->engine->answer_intent(r, IntentLabel::zakat_calculation), as_json);
      return kExitOk;
    }
    if (*inherit) {
      Estate estate;
      std::stringstream ss(heirs_s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        std::string name = eq == std::string::npos ? item : item.substr(0, eq);
        int count = eq == std::string::npos ? 1 : std::stoi(item.substr(eq + 1));
        auto kind = parse_heir_kind(name);
        if (!kind) {
          std::cerr << "unknown heir kind: " << name << "\n";
          return kExitValidation;
        }
        estate.heirs[*kind] += count;
      }
      estate.net_estate_cents = estate_cents;
      auto outcomes = distribute(estate, policy);
      if (as_json) {
        json arr = json::array();
        for (const auto& o : outcomes) arr.push_back(outcome_to_json(o));
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& o : outcomes) {
          std::cout << to_string(o.policy) << ":\n";
          for (const auto& [name, s] : o.shares) {
            std::cout << "  " << name << ": " << s.fraction.str();
            if (estate_cents > 0) std::cout << " = " << format_cents(s.amount_cents);
            std::cout << "\n";
          }
        }
      }
      return kExitOk;
    }
    if (*quran_cmd) {
      AskRequest r;
      r.query = query;
      print_response(rt->engine->answer_intent(r, IntentLabel::quran_retrieval), as_json);
      return kExitOk;
    }
    if (*prayer || *qibla_cmd) {
      GeoPoint p;
      std::string display;
      has_latlon = (*prayer && po_lat->count() > 0) || (*qibla_cmd && qo_lat->count() > 0);
      if (has_latlon) {
        p = {lat, lon, tz_minutes};
        display = "the given coordinates";
      } else if (!city.empty()) {
        auto rec = rt->engine->cities().lookup(city);
        if (!rec) {
          std::cerr << "unknown city: " << city << "\n";
          return kExitValidation;
        }
        p = rec->point;
        display = rec->name;
      } else {
        std::cerr << "provide --city or --lat/--lon\n";
        return kExitValidation;
      }
      if (*qibla_cmd) {
        auto q = qibla(p);
        if (as_json) {
          json j;
          j["bearing_deg"] = q.bearing_deg;
          j["distance_km"] = q.distance_km;
          std::cout << j.dump(2) << "\n";
        } else {
          std::cout << "qibla bearing from " << display << ": " << q.bearing_deg
                    << " deg, distance " << q.distance_km << " km\n";
        }
        return kExitOk;
      }
      auto m = find_method(method.empty() ? "MWL" : method);
      if (!m) {
        std::cerr << "unknown method: " << method << "\n";
        return kExitValidation;
      }
      GregorianDate d = rt->engine->today();
      if (!date_s.empty() &&
          std::sscanf(date_s.c_str(), "%d-%d-%d", &d.year, &d.month, &d.day) != 3) {
        std::cerr << "date must be YYYY-MM-DD\n";
        return kExitValidation;
      }
      auto t = solar_schedule(p, d, *m);
      auto cell = [](const std::optional<double>& v) {
        return v ? format_hhmm(*v) : std::string("undefined");
      };
      if (as_json) {
        json j;
        j["fajr"] = cell(t.fajr);
        j["sunrise"] = cell(t.sunrise);
        j["dhuhr"] = cell(t.dhuhr);
        j["asr"] = cell(t.asr);
        j["maghrib"] = cell(t.maghrib);
        j["isha"] = cell(t.isha);
        j["method"] = m->name;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "Fajr " << cell(t.fajr) << "\nSunrise " << cell(t.sunrise) << "\nDhuhr "
                  << cell(t.dhuhr) << "\nAsr " << cell(t.asr) << "\nMaghrib "
                  << cell(t.maghrib) << "\nIsha " << cell(t.isha) << "\n";
      }
      return kExitOk;
    }
    if (*calendar_cmd) {
      AskRequest r;
      r.query = query;
      print_response(rt->engine->answer_intent(r, IntentLabel::islamic_calendar), as_json);
      return kExitOk;
    }
    if (*dua) {
      AskRequest r;
      r.query = query;
      print_response(rt->engine->answer_intent(r, IntentLabel::dua_lookup), as_json);
      return kExitOk;
    }
    if (*eval_r) return run_eval_router(*rt, eval_path, as_json);
    if (*eval_n) return run_eval_nl2sql(*rt, eval_path, pred_path, as_json);
    if (*serve) {
      HttpService service(*rt->engine);
      std::cout << "listening on " << host << ":" << port << "\n";
      if (!service.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return kExitInternal;
      }
      return kExitOk;
    }
  } catch (const EngineError& e) {
    std::cerr << "error (" << e.route << "/" << e.stage << "): " << e.what() << "\n";
    return e.validation ? kExitValidation : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
