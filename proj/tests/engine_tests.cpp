#include <doctest.h>

#include "minaret/engine.hpp"
#include "minaret/json_io.hpp"
#include "support.hpp"

using namespace minaret;

namespace {

struct Fixture {
  TrigramEmbedder emb;
  StubTextGenerator gen;
  QuranStore quran{data_path("quran.db")};
  DocumentStore docs{&emb};
  DuaStore duas{&emb};
  Engine engine;

  Fixture()
      : engine([this] {
          docs.load(data_path("docs.jsonl"));
          duas.load(data_path("duas.jsonl"));
          return make_options();
        }()) {}

  EngineOptions make_options() {
    EngineOptions o;
    o.generator = &gen;
    o.embedder = &emb;
    o.quran = &quran;
    o.documents = &docs;
    o.duas = &duas;
    o.today = [] { return GregorianDate{2026, 8, 23}; };
    return o;
  }
};

Fixture& fx() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("gate admits Islamic queries and rejects off-domain ones") {
  ExecutionTrace trace;
  GateScore in = fx().engine.gate("What is the ruling on fasting while traveling?", trace);
  CHECK(in.is_islamic);
  CHECK(in.score >= kGateThreshold);

  GateScore out = fx().engine.gate("best pizza recipe with extra cheese", trace);
  CHECK(!out.is_islamic);

  GateScore ref = fx().engine.gate("2:255", trace);
  CHECK(ref.is_islamic);  // verse references pass the gate
}

TEST_CASE("gate failure fails open") {
  struct ThrowingScorer final : GateScorer {
    double score(const std::string&) override { throw std::runtime_error("scorer down"); }
  } scorer;
  EngineOptions o = fx().make_options();
  o.gate_scorer = &scorer;
  Engine e(std::move(o));
  ExecutionTrace trace;
  CHECK(e.gate("anything at all", trace).is_islamic);
}

TEST_CASE("off-domain query gets a polite refusal, not an answer") {
  AssembledResponse r = fx().engine.ask({"best pizza recipe with extra cheese"});
  CHECK(r.route == "gate");
  CHECK(!r.answer.empty());
  CHECK(r.references.empty());
}

TEST_CASE("empty query is a validation error") {
  try {
    fx().engine.ask({"   "});
    FAIL("expected EngineError");
  } catch (const EngineError& e) {
    CHECK(e.validation);
  }
}

TEST_CASE("bare verse reference is answered with the verse") {
  AssembledResponse r = fx().engine.ask({"2:275"});
  REQUIRE(!r.references.empty());
  CHECK(r.references[0].source_url == std::string("https://quran.com/2/275"));
  CHECK(r.tool_metadata.at("intent") == "quran_retrieval");
}

TEST_CASE("greeting route") {
  AssembledResponse r = fx().engine.ask({"Assalamu alaikum"});
  CHECK(r.tool_metadata.at("intent") == "greeting");
  CHECK(!r.answer.empty());
}

TEST_CASE("calendar route: current hijri with pinned clock") {
  AssembledResponse r = fx().engine.ask({"What is today's Hijri date?"});
  CHECK(r.tool_metadata.at("intent") == "islamic_calendar");
  // 2026-08-23 CE is 10 Rabi al-Awwal 1448 in the tabular calendar.
  CHECK(r.answer.find("1448") != std::string::npos);
}

TEST_CASE("calendar route: explicit conversion") {
  AskRequest req;
  req.query = "Convert 2025-06-26 to the Islamic calendar";
  AssembledResponse r = fx().engine.answer_intent(req, IntentLabel::islamic_calendar);
  CHECK(r.answer.find("1447") != std::string::npos);
}

TEST_CASE("prayer route with a known city") {
  AskRequest req;
  req.query = "prayer times in Riyadh";
  AssembledResponse r = fx().engine.answer_intent(req, IntentLabel::prayer_times);
  CHECK(r.tool_metadata.at("intent") == "prayer_times");
  CHECK(r.answer.find("Fajr") != std::string::npos);
  CHECK(r.answer.find("Isha") != std::string::npos);
}

TEST_CASE("qibla query inside the prayer route") {
  AskRequest req;
  req.query = "Which direction is the qibla from London?";
  AssembledResponse r = fx().engine.answer_intent(req, IntentLabel::prayer_times);
  CHECK(r.answer.find("qibla") != std::string::npos);
}

TEST_CASE("unknown prayer method errors as validation") {
  AskRequest req;
  req.query = "prayer times in Riyadh";
  req.method = "MadeUpMethod";
  try {
    fx().engine.answer_intent(req, IntentLabel::prayer_times);
    FAIL("expected EngineError");
  } catch (const EngineError& e) {
    CHECK(e.validation);
  }
}

TEST_CASE("zakat route computes from free text") {
  AssembledResponse r = fx().engine.ask({"How much zakat do I owe on $10,000?"});
  CHECK(r.tool_metadata.at("intent") == "zakat_calculation");
  // default prices: nisab = min(85*7500, 595*110) = 65450 cents
  CHECK(r.answer.find("654.50") != std::string::npos);
  CHECK(r.answer.find("250.00") != std::string::npos);
}

TEST_CASE("zakat route asks for clarification when nothing is extractable") {
  AskRequest req;
  req.query = "zakat?";
  AssembledResponse r = fx().engine.answer_intent(req, IntentLabel::zakat_calculation);
  CHECK(!r.answer.empty());
  CHECK(r.answer.find("654.50") == std::string::npos);  // no fabricated numbers
}

TEST_CASE("inheritance route parses heirs from text") {
  AssembledResponse r =
      fx().engine.ask({"How is inheritance divided between a wife and two sons?"});
  CHECK(r.tool_metadata.at("intent") == "inheritance_calculation");
  CHECK(r.answer.find("1/8") != std::string::npos);
}

TEST_CASE("dua route returns a stored supplication") {
  AssembledResponse r = fx().engine.ask({"What is the dua for traveling?"});
  CHECK(r.tool_metadata.at("intent") == "dua_lookup");
  CHECK(!r.references.empty());
}

TEST_CASE("fiqh route answers with citations or abstains") {
  AssembledResponse r = fx().engine.ask({"What is the ruling on paying zakat on savings?"});
  for (int tag : cite_tags_in(r.answer)) {
    bool found = false;
    for (const auto& c : r.references) found = found || c.tag == tag;
    CHECK(found);
  }
}

TEST_CASE("determinism: identical requests give identical responses") {
  const char* queries[] = {
      "2:275", "Assalamu alaikum", "prayer times in Riyadh",
      "How much zakat do I owe on $10,000?", "What is the dua for traveling?",
  };
  for (const char* q : queries) {
    CAPTURE(q);
    AssembledResponse a = fx().engine.ask({q});
    AssembledResponse b = fx().engine.ask({q});
    CHECK(a.answer == b.answer);
    CHECK(a.references == b.references);
    CHECK(a.route == b.route);
  }
}

TEST_CASE("heir text parsing") {
  ParsedEstate p = parse_heirs_text("a wife, 2 sons and a daughter, estate of $120,000");
  CHECK(p.heirs[HeirKind::wife] == 1);
  CHECK(p.heirs[HeirKind::son] == 2);
  CHECK(p.heirs[HeirKind::daughter] == 1);
  CHECK(p.estate_cents == 12000000);

  ParsedEstate q = parse_heirs_text("husband and two daughters");
  CHECK(q.heirs[HeirKind::husband] == 1);
  CHECK(q.heirs[HeirKind::daughter] == 2);
  CHECK(!q.estate_cents.has_value());

  // "grandfather" must not also count as "father"
  ParsedEstate g = parse_heirs_text("a grandfather and a son");
  CHECK(g.heirs[HeirKind::paternal_grandfather] == 1);
  CHECK(g.heirs.count(HeirKind::father) == 0);
}

TEST_CASE("json rendering carries trace and references") {
  AssembledResponse r = fx().engine.ask({"2:255"});
  auto j = response_to_json(r);
  CHECK(j.contains("answer"));
  CHECK(j.contains("references"));
  CHECK(j.contains("trace"));
  CHECK(j["trace"].is_array());
  CHECK(!j["trace"].empty());
}
