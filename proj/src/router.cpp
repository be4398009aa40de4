#include "minaret/router.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace minaret {
namespace {

using nlohmann::json;

constexpr std::array<const char*, 9> kIntentNames = {
    "fiqh_ruling",       "quran_retrieval",         "general_islamic",
    "greeting",          "zakat_calculation",       "inheritance_calculation",
    "dua_lookup",        "islamic_calendar",        "prayer_times",
};

const char* kClassifierPromptTemplate = R"(You are an expert **Islamic question classifier**.

Analyze the user's question and classify it into **ONE** of these categories:

1. **fiqh_ruling**: Questions asking for Islamic legal rulings, permissibility, obligations, or jurisprudence
   Examples: "Is X halal?", "What's the ruling on Y?", "هل هذا حلال؟", "ما حكم كذا؟"

2. **quran_retrieval**: Questions asking for specific Quranic verses or ayahs
   Examples: "What does verse 2:255 say?", "Find ayah about patience", "ما هي الآية رقم 255 من سورة البقرة؟", "اكتب الآية 275 من سورة البقرة"

3. **general_islamic**: General questions about Islamic knowledge, history, concepts, or practices
   Examples: "Who was Umar ibn al-Khattab?", "What is tawakkul?", "ما معنى الإحسان؟"

4. **greeting**: Simple greetings, thanks, or pleasantries
   Examples: "Hi", "Thanks!", "السلام عليكم", "جزاك الله خيرًا"

5. **zakat_calculation**: Requests to compute Zakat owed based on assets, debts, or metal prices
   Examples: "How much zakat do I pay on $10,000?", "زكاة المال كم؟"

6. **inheritance_calculation**: Requests to divide an estate among heirs (Mirath/Faraid)
   Examples: "Split inheritance among wife and children", "قسمة الميراث بين الورثة"

7. **dua_lookup**: Requests for duas (supplications) or adhkar (remembrances), or what to say in specific situations
   Examples: "dua for entering bathroom", "morning adhkar", "what to say before sleeping", "دعاء دخول الحمام"

8. **islamic_calendar**: Questions about Hijri/Islamic dates, date conversions, or Islamic events/holidays
   Examples: "What is today's Hijri date?", "When is Ramadan 2025?", "Convert March 1 to Hijri", "When is Eid?", "ما هو التاريخ الهجري اليوم؟", "متى رمضان؟"

9. **prayer_times**: Questions about prayer times, salah timing, or Qibla direction for a location
   Examples: "What time is Fajr in Dubai?", "Prayer times for London", "Which direction is Qibla from Tokyo?", "أوقات الصلاة في الرياض", "اتجاه القبلة"

Return ONLY valid JSON in this format (no markdown, no explanation):
{
  "question_type": "fiqh_ruling",
  "language": "en",
  "confidence": 0.95,
  "reasoning": "Brief explanation",
  "subquestions": ["question1"],
  "requires_retrieval": true
}

Classify the question below:

Question: {question})";

// Extract the first top-level JSON object from text that may carry prose or
// markdown fences around it.
std::optional<std::string> extract_json_object(const std::string& raw) {
  auto start = raw.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    char c = raw[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}') {
      if (--depth == 0) return raw.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

bool retrieval_default(IntentLabel intent) {
  switch (intent) {
    case IntentLabel::fiqh_ruling:
    case IntentLabel::quran_retrieval:
    case IntentLabel::general_islamic:
    case IntentLabel::dua_lookup:
      return true;
    default:
      return false;
  }
}

}  // namespace

const std::vector<IntentLabel>& all_intents() {
  static const std::vector<IntentLabel> v = {
      IntentLabel::fiqh_ruling,       IntentLabel::quran_retrieval,
      IntentLabel::general_islamic,   IntentLabel::greeting,
      IntentLabel::zakat_calculation, IntentLabel::inheritance_calculation,
      IntentLabel::dua_lookup,        IntentLabel::islamic_calendar,
      IntentLabel::prayer_times};
  return v;
}

std::string to_string(IntentLabel intent) {
  return kIntentNames[static_cast<std::size_t>(intent)];
}

std::optional<IntentLabel> parse_intent(const std::string& s) {
  for (std::size_t i = 0; i < kIntentNames.size(); ++i)
    if (s == kIntentNames[i]) return static_cast<IntentLabel>(i);
  return std::nullopt;
}

std::string to_string(ExecutionRoute route) {
  switch (route) {
    case ExecutionRoute::tool: return "tool";
    case ExecutionRoute::calculation: return "calculation";
    case ExecutionRoute::retrieval: return "retrieval";
    case ExecutionRoute::quran: return "quran";
  }
  return "tool";
}

ExecutionRoute route_for(IntentLabel intent) {
  switch (intent) {
    case IntentLabel::greeting:
    case IntentLabel::islamic_calendar:
    case IntentLabel::prayer_times:
    case IntentLabel::dua_lookup:
      return ExecutionRoute::tool;
    case IntentLabel::zakat_calculation:
    case IntentLabel::inheritance_calculation:
      return ExecutionRoute::calculation;
    case IntentLabel::fiqh_ruling:
    case IntentLabel::general_islamic:
      return ExecutionRoute::retrieval;
    case IntentLabel::quran_retrieval:
      return ExecutionRoute::quran;
  }
  return ExecutionRoute::retrieval;
}

double margin_confidence(double sim1, double sim2) {
  double c = (sim1 - sim2) / 2.0 + 0.5;
  return std::clamp(c, 0.0, 1.0);
}

std::vector<std::pair<IntentLabel, std::pair<std::string, std::string>>>
default_prototype_seed() {
  using P = std::pair<std::string, std::string>;
  return {
      {IntentLabel::fiqh_ruling,
       P{"What is the ruling on music in Islam?", "ما حكم الموسيقى في الإسلام؟"}},
      {IntentLabel::quran_retrieval,
       P{"Quote Surah Al-Baqarah verse 275.", "اكتب الآية 275 من سورة البقرة"}},
      {IntentLabel::general_islamic,
       P{"What are the five pillars of Islam?", "ما هي أركان الإسلام الخمسة؟"}},
      {IntentLabel::greeting, P{"Assalamu alaikum.", "السلام عليكم"}},
      {IntentLabel::zakat_calculation,
       P{"I have 100 grams of gold, how much zakat?", "احسب زكاتي على الذهب"}},
      {IntentLabel::inheritance_calculation,
       P{"What is the share of wife in inheritance?", "ما نصيب الزوجة من الميراث؟"}},
      {IntentLabel::dua_lookup,
       P{"What is the dua for entering the toilet?", "ما هو دعاء دخول الحمام؟"}},
      {IntentLabel::islamic_calendar,
       P{"What is today's Hijri date?", "ما هو التاريخ الهجري اليوم؟"}},
      {IntentLabel::prayer_times,
       P{"What time is Fajr in Dubai?", "متى صلاة الفجر في دبي؟"}},
  };
}

std::string classifier_prompt(const std::string& question) {
  std::string prompt = kClassifierPromptTemplate;
  auto pos = prompt.rfind("{question}");
  prompt.replace(pos, 10, question);
  return prompt;
}

Router::Router(TextGenerator* generator, Embedder* embedder)
    : generator_(generator), embedder_(embedder) {
  for (const auto& [intent, pair] : default_prototype_seed()) {
    add_prototype(intent, "en", pair.first);
    add_prototype(intent, "ar", pair.second);
  }
}

void Router::add_prototype(IntentLabel intent, const std::string& language,
                           const std::string& exemplar) {
  IntentPrototype p;
  p.intent = intent;
  p.language = language;
  p.exemplar_text = exemplar;
  p.embedding = embedder_->embed(exemplar);
  prototypes_.push_back(std::move(p));
}

void Router::load_prototypes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prototype file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string intent_s, lang, text;
    if (!std::getline(ls, intent_s, '\t') || !std::getline(ls, lang, '\t') ||
        !std::getline(ls, text))
      continue;
    auto intent = parse_intent(intent_s);
    if (!intent) continue;
    add_prototype(*intent, lang, text);
  }
}

std::optional<RouterDecision> Router::parse_classifier_json(const std::string& raw) {
  auto body = extract_json_object(raw);
  if (!body) return std::nullopt;
  json doc;
  try {
    doc = json::parse(*body);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!doc.is_object()) return std::nullopt;
  if (!doc.contains("question_type") || !doc["question_type"].is_string())
    return std::nullopt;
  auto intent = parse_intent(doc["question_type"].get<std::string>());
  if (!intent) return std::nullopt;
  if (!doc.contains("confidence") || !doc["confidence"].is_number())
    return std::nullopt;
  double conf = doc["confidence"].get<double>();
  if (!(conf >= 0.0 && conf <= 1.0)) return std::nullopt;

  RouterDecision d;
  d.intent = *intent;
  d.confidence = conf;
  d.origin = DecisionOrigin::primary;
  if (doc.contains("language") && doc["language"].is_string()) {
    auto lang = doc["language"].get<std::string>();
    if (lang != "ar" && lang != "en") return std::nullopt;
    d.language = lang;
  }
  if (doc.contains("reasoning") && doc["reasoning"].is_string())
    d.reasoning = doc["reasoning"].get<std::string>();
  if (doc.contains("subquestions") && doc["subquestions"].is_array())
    for (const auto& q : doc["subquestions"])
      if (q.is_string()) d.subquestions.push_back(q.get<std::string>());
  if (doc.contains("requires_retrieval") && doc["requires_retrieval"].is_boolean())
    d.requires_retrieval = doc["requires_retrieval"].get<bool>();
  else
    d.requires_retrieval = retrieval_default(*intent);
  return d;
}

RouterDecision Router::fallback_classify(const std::string& query,
                                         ExecutionTrace& trace) const {
  std::vector<float> qv;
  try {
    qv = embedder_->embed(query);
  } catch (const std::exception& e) {
    trace.warn(std::string("fallback embedder failed: ") + e.what());
    RouterDecision d;
    d.intent = IntentLabel::general_islamic;
    d.confidence = 0.5;
    d.reasoning = "embedder unavailable; defaulting to general_islamic";
    d.requires_retrieval = true;
    d.origin = DecisionOrigin::fallback;
    return d;
  }

  // Per (intent, language) class: max cosine over its exemplars.
  std::map<std::pair<IntentLabel, std::string>, std::pair<double, const IntentPrototype*>> best;
  for (const auto& p : prototypes_) {
    double sim = cosine(qv, p.embedding);
    auto key = std::make_pair(p.intent, p.language);
    auto it = best.find(key);
    if (it == best.end() || sim > it->second.first) best[key] = {sim, &p};
  }

  // Argmax with deterministic tie-break: IntentLabel enumeration order,
  // then "ar" before "en" lexicographically.
  const IntentPrototype* top = nullptr;
  double sim1 = -2.0, sim2 = -2.0;
  for (IntentLabel intent : all_intents()) {
    for (const std::string& lang : {"ar", "en"}) {
      auto it = best.find({intent, lang});
      if (it == best.end()) continue;
      double sim = it->second.first;
      if (sim > sim1) {
        sim2 = sim1;
        sim1 = sim;
        top = it->second.second;
      } else if (sim > sim2) {
        sim2 = sim;
      }
    }
  }

  RouterDecision d;
  d.origin = DecisionOrigin::fallback;
  if (!top) {
    d.intent = IntentLabel::general_islamic;
    d.confidence = 0.5;
    d.reasoning = "no prototypes available";
    d.requires_retrieval = true;
    return d;
  }
  d.intent = top->intent;
  d.language = top->language;
  d.confidence = margin_confidence(sim1, sim2 <= -2.0 ? sim1 : sim2);
  d.reasoning = "nearest prototype: \"" + top->exemplar_text + "\"";
  d.requires_retrieval = retrieval_default(top->intent);
  trace.add("router.fallback",
            "class " + to_string(top->intent) + " confidence " + std::to_string(d.confidence));
  return d;
}

RouterDecision Router::classify(const std::string& query, ExecutionTrace& trace) const {
  std::string trimmed = query;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) throw std::invalid_argument("query is empty");

  std::string raw;
  try {
    raw = generator_->generate(classifier_prompt(query), 0.0, 512);
  } catch (const std::exception& e) {
    trace.warn(std::string("primary classifier invocation failed: ") + e.what());
    return fallback_classify(query, trace);
  }
  auto parsed = parse_classifier_json(raw);
  if (!parsed) {
    trace.add("router.primary", "malformed classifier output; using fallback");
    return fallback_classify(query, trace);
  }
  if (parsed->confidence < 0.5) {
    trace.add("router.primary",
              "low confidence " + std::to_string(parsed->confidence) + "; using fallback");
    return fallback_classify(query, trace);
  }
  trace.add("router.primary", "intent " + to_string(parsed->intent));
  return *parsed;
}

}  // namespace minaret
