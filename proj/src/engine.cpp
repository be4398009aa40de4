#include "minaret/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <regex>
#include <sstream>

namespace minaret {
namespace {

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

GregorianDate system_today() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return {tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday};
}

std::string fmt_date(const GregorianDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string fmt_hijri(const HijriDate& h) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", h.year, h.month, h.day);
  return std::string(buf) + " AH";
}

}  // namespace

double KeywordGateScorer::score(const std::string& query) {
  static const char* kLexicon[] = {
      "islam",  "quran",   "qur'an", "surah",  "ayah",    "allah",  "prayer",
      "salah",  "pray",    "zakat",  "inherit", "faraid", "dua",    "adhkar",
      "hijri",  "ramadan", "eid",    "hajj",   "umrah",   "mosque", "masjid",
      "halal",  "haram",   "fiqh",   "fatwa",  "prophet", "muhammad", "hadith",
      "sunnah", "qibla",   "wudu",   "fasting", "sawm",   "muslim", "imam",
      "salam",  "alaikum", "bismillah", "insha", "alhamdulillah",
      "الله",   "صلاة",    "زكاة",   "قرآن",   "سورة",    "دعاء",   "رمضان",
      "حج",     "صوم",     "مسجد",   "حلال",   "حرام",    "ميراث",  "قبلة",
      "هجري",   "عيد",     "اسلام",  "إسلام",  "حديث",    "وضوء",   "آية",
      "اية",    "فقه",     "فتوى",   "أذكار",  "اذكار",   "نبي",    "سلام"};
  std::string low = lower_ascii(query);
  for (const char* w : kLexicon)
    if (low.find(w) != std::string::npos) return 1.0;
  // bare verse references ("2:275") count as Islamic
  static const std::regex verse(R"(\b\d{1,3}\s*:\s*\d{1,4}\b)");
  if (std::regex_search(low, verse)) return 1.0;
  return 0.0;
}

Engine::Engine(EngineOptions opts)
    : opts_(std::move(opts)), router_(opts_.generator, opts_.embedder) {
  if (!opts_.generator || !opts_.embedder)
    throw EngineError("engine", "construct", "generator and embedder are required", true);
  if (!opts_.gate_scorer) opts_.gate_scorer = &default_gate_;
  if (!opts_.geocoder) opts_.geocoder = &null_geocoder_;
  if (!opts_.today) opts_.today = system_today;
}

GateScore Engine::gate(const std::string& query, ExecutionTrace& trace) const {
  GateScore g;
  g.threshold = kGateThreshold;
  try {
    g.score = opts_.gate_scorer->score(query);
  } catch (const std::exception& e) {
    trace.warn(std::string("gate scorer failed; failing open: ") + e.what());
    g.score = 1.0;
  }
  g.is_islamic = g.score >= g.threshold;
  trace.add("gate", "score " + std::to_string(g.score) + (g.is_islamic ? " (in scope)" : " (out of scope)"));
  return g;
}

AssembledResponse Engine::ask(const AskRequest& req) const {
  if (req.query.find_first_not_of(" \t\r\n") == std::string::npos)
    throw EngineError("ask", "validate", "query must be non-empty", true);

  ExecutionTrace trace;
  trace.add("ask", "received query");

  GateScore g = gate(req.query, trace);
  if (!g.is_islamic) {
    std::string lang = req.language.value_or(detect_language_ratio(req.query, &trace));
    std::string msg = lang == "ar"
        ? "هذا المساعد مخصص للأسئلة الإسلامية. يسعدني مساعدتك في أسئلة الفقه "
          "والقرآن والعبادات."
        : "This assistant is dedicated to Islamic questions. I would be glad to "
          "help with fiqh, Quran, worship, or related topics.";
    return assemble_response(msg, {}, std::move(trace), "gate");
  }

  // A bare verse reference carries no lexical signal for the classifier;
  // recognize it directly.
  static const std::regex bare_ref(R"(^\s*\d{1,3}\s*:\s*\d{1,4}(\s*-\s*\d{1,4})?\s*$)");
  if (std::regex_match(req.query, bare_ref)) {
    trace.add("router.shortcut", "bare verse reference");
    RouterDecision d;
    d.intent = IntentLabel::quran_retrieval;
    d.language = req.language.value_or("en");
    d.confidence = 1.0;
    d.reasoning = "verse reference pattern";
    d.requires_retrieval = true;
    return dispatch(req, d, std::move(trace));
  }

  RouterDecision decision = router_.classify(req.query, trace);
  if (req.language) decision.language = *req.language;
  return dispatch(req, decision, std::move(trace));
}

AssembledResponse Engine::answer_intent(const AskRequest& req, IntentLabel intent) const {
  if (req.query.find_first_not_of(" \t\r\n") == std::string::npos)
    throw EngineError(to_string(route_for(intent)), "validate", "query must be non-empty", true);
  ExecutionTrace trace;
  RouterDecision decision;
  decision.intent = intent;
  decision.language = req.language.value_or(detect_language_ratio(req.query, &trace));
  decision.confidence = 1.0;
  decision.reasoning = "direct endpoint";
  trace.add("dispatch.direct", to_string(intent));
  return dispatch(req, decision, std::move(trace));
}

namespace {

std::string render_timetable(const PrayerTimetable& t) {
  auto cell = [](const std::optional<double>& v) {
    return v ? format_hhmm(*v) : std::string("undefined");
  };
  std::ostringstream os;
  os << "Fajr " << cell(t.fajr) << ", Sunrise " << cell(t.sunrise) << ", Dhuhr "
     << cell(t.dhuhr) << ", Asr " << cell(t.asr) << ", Maghrib " << cell(t.maghrib)
     << ", Isha " << cell(t.isha);
  return os.str();
}

}  // namespace

ParsedEstate parse_heirs_text(const std::string& query) {
  ParsedEstate out;
  std::string low = lower_ascii(query);

  struct Pattern { const char* word; HeirKind kind; };
  // ordered so that longer, more specific phrases match before generic ones
  static const Pattern kPatterns[] = {
      {"paternal grandfather", HeirKind::paternal_grandfather},
      {"grandfather", HeirKind::paternal_grandfather},
      {"grandmother", HeirKind::grandmother},
      {"son's son", HeirKind::sons_son},
      {"grandson", HeirKind::sons_son},
      {"son's daughter", HeirKind::sons_daughter},
      {"granddaughter", HeirKind::sons_daughter},
      {"full brother", HeirKind::full_brother},
      {"paternal brother", HeirKind::paternal_brother},
      {"paternal half-brother", HeirKind::paternal_brother},
      {"full sister", HeirKind::full_sister},
      {"paternal sister", HeirKind::paternal_sister},
      {"paternal half-sister", HeirKind::paternal_sister},
      {"uterine sibling", HeirKind::uterine_sibling},
      {"maternal brother", HeirKind::uterine_sibling},
      {"maternal sister", HeirKind::uterine_sibling},
      {"husband", HeirKind::husband},
      {"wives", HeirKind::wife},
      {"wife", HeirKind::wife},
      {"sons", HeirKind::son},
      {"daughters", HeirKind::daughter},
      {"daughter", HeirKind::daughter},
      {"father", HeirKind::father},
      {"mother", HeirKind::mother},
      {"brothers", HeirKind::full_brother},
      {"brother", HeirKind::full_brother},
      {"sisters", HeirKind::full_sister},
      {"sister", HeirKind::full_sister},
      {"son", HeirKind::son},
  };

  std::vector<bool> consumed(low.size(), false);
  for (const auto& p : kPatterns) {
    std::string word = p.word;
    std::size_t pos = 0;
    while ((pos = low.find(word, pos)) != std::string::npos) {
      // word-boundary check and skip regions claimed by longer phrases
      bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(low[pos - 1]));
      std::size_t end = pos + word.size();
      bool right_ok = end >= low.size() || !std::isalpha(static_cast<unsigned char>(low[end]));
      bool free = true;
      for (std::size_t i = pos; i < end; ++i)
        if (consumed[i]) { free = false; break; }
      if (left_ok && right_ok && free) {
        for (std::size_t i = pos; i < end; ++i) consumed[i] = true;
        // look back a few characters for a leading count
        int count = 1;
        std::size_t back = pos;
        while (back > 0 && (low[back - 1] == ' ')) --back;
        std::size_t dig_end = back;
        while (back > 0 && std::isdigit(static_cast<unsigned char>(low[back - 1]))) --back;
        if (back < dig_end) count = std::stoi(low.substr(back, dig_end - back));
        else {
          static const std::pair<const char*, int> kWords[] = {
              {"two ", 2}, {"three ", 3}, {"four ", 4}};
          for (auto& [w, n] : kWords) {
            std::size_t wl = std::strlen(w);
            if (pos >= wl && low.compare(pos - wl, wl, w) == 0) count = n;
          }
        }
        out.heirs[p.kind] += count;
      }
      pos = end;
    }
  }

  static const std::regex money(R"((?:\$\s*|estate (?:of|is|worth)\s*\$?\s*)([0-9][0-9,]*)(?:\.([0-9]{1,2}))?)");
  std::smatch m;
  if (std::regex_search(low, m, money)) {
    std::string digits = m[1];
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    long long dollars = std::stoll(digits);
    long long cents = dollars * 100;
    if (m[2].matched) {
      std::string frac = m[2];
      cents += std::stoll(frac) * (frac.size() == 1 ? 10 : 1);
    }
    out.estate_cents = cents;
  }
  return out;
}

AssembledResponse Engine::dispatch(const AskRequest& req, const RouterDecision& decision,
                                   ExecutionTrace trace) const {
  const std::string route = to_string(route_for(decision.intent));
  trace.add("dispatch", to_string(decision.intent) + " via " + route + " route");
  std::vector<Citation> citations;
  std::string answer;

  try {
    switch (decision.intent) {
      case IntentLabel::greeting: {
        answer = greet(req.query, *opts_.generator, opts_.config.greeting_temperature,
                       opts_.config.greeting_max_tokens, trace);
        break;
      }

      case IntentLabel::islamic_calendar: {
        auto kind = detect_calendar_kind(req.query, &trace);
        GregorianDate today = opts_.today();
        bool ar = decision.language == "ar";
        const char* disclaimer = ar ? kMoonSightingDisclaimerAr : kMoonSightingDisclaimerEn;
        switch (kind) {
          case CalendarQueryKind::current_hijri: {
            auto conv = gregorian_to_hijri(today);
            answer = "Today (" + fmt_date(today) + ") is " + fmt_hijri(conv.date) +
                     " in the Umm al-Qura calendar. " + disclaimer;
            break;
          }
          case CalendarQueryKind::greg_to_hijri: {
            static const std::regex iso(R"((\d{3,4})-(\d{1,2})-(\d{1,2}))");
            std::smatch m;
            GregorianDate d = today;
            if (std::regex_search(req.query, m, iso))
              d = {std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])};
            auto conv = gregorian_to_hijri(d);
            answer = fmt_date(d) + " corresponds to " + fmt_hijri(conv.date) + ". " + disclaimer;
            break;
          }
          case CalendarQueryKind::hijri_to_greg: {
            static const std::regex iso(R"((\d{3,4})-(\d{1,2})-(\d{1,2}))");
            std::smatch m;
            if (!std::regex_search(req.query, m, iso))
              throw EngineError(route, "calendar",
                                "please give the Hijri date as YYYY-MM-DD", true);
            HijriDate h{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])};
            answer = fmt_hijri(h) + " corresponds to " + fmt_date(hijri_to_gregorian(h)) +
                     ". " + disclaimer;
            break;
          }
          case CalendarQueryKind::event_date: {
            std::string low = lower_ascii(req.query);
            std::optional<IslamicEvent> hit;
            for (const auto& ev : events_.events()) {
              if (low.find(lower_ascii(ev.name_en)) != std::string::npos ||
                  req.query.find(ev.name_ar) != std::string::npos) {
                hit = ev;
                break;
              }
            }
            if (!hit) {
              answer = "I could not identify the event. Known events include: ";
              auto keys = events_.known_keys();
              for (std::size_t i = 0; i < keys.size() && i < 8; ++i)
                answer += (i ? ", " : "") + keys[i];
              answer += ".";
            } else {
              auto g = events_.next_occurrence(hit->key, today);
              answer = hit->name_en + " (" + hit->name_ar + ") next falls on " +
                       fmt_date(g) + ". " + disclaimer;
            }
            break;
          }
          case CalendarQueryKind::upcoming_events: {
            auto list = events_.upcoming(today, 5);
            std::ostringstream os;
            os << "Upcoming Islamic events:";
            for (const auto& [ev, g] : list)
              os << "\n- " << ev.name_en << " (" << ev.name_ar << "): " << fmt_date(g);
            os << "\n" << disclaimer;
            answer = os.str();
            break;
          }
        }
        break;
      }

      case IntentLabel::prayer_times: {
        std::string loc_query = req.location.value_or(req.query);
        auto loc = resolve_location(loc_query, cities_, opts_.generator, opts_.geocoder, trace);
        std::string low = lower_ascii(req.query);
        bool wants_qibla = low.find("qibla") != std::string::npos ||
                           req.query.find("قبلة") != std::string::npos ||
                           req.query.find("القبلة") != std::string::npos;
        if (wants_qibla) {
          auto q = qibla(loc.point);
          std::ostringstream os;
          os.precision(1);
          os << std::fixed << "From " << loc.display_name << ", the qibla bearing is "
             << q.bearing_deg << " degrees from true north (distance to the Kaaba about "
             << q.distance_km << " km).";
          answer = os.str();
        } else {
          auto method = find_method(req.method.value_or("MWL"));
          if (!method)
            throw EngineError(route, "prayer",
                              "unknown calculation method: " + req.method.value_or("MWL"), true);
          auto t = solar_schedule(loc.point, opts_.today(), *method);
          answer = "Prayer times for " + loc.display_name + " on " +
                   fmt_date(opts_.today()) + " (" + method->name + "): " +
                   render_timetable(t);
        }
        if (loc.disclaimer)
          answer += " Location could not be resolved precisely; Makkah coordinates were used.";
        break;
      }

      case IntentLabel::dua_lookup: {
        if (!opts_.duas)
          throw EngineError(route, "dua", "dua store not loaded", false);
        auto res = opts_.duas->lookup(req.query, opts_.generator, trace, decision.language);
        if (res.entry) {
          answer = res.entry->arabic + "\n\n" + res.entry->translation;
          if (!res.entry->reference_url.empty())
            citations.push_back({1, res.entry->page_title, res.entry->reference_url, std::nullopt});
          else
            citations.push_back({1, res.entry->page_title, std::nullopt, std::nullopt});
        } else {
          answer = res.message;
        }
        break;
      }

      case IntentLabel::zakat_calculation: {
        auto extracted = extract_parameters(req.query, opts_.generator, trace);
        if (std::holds_alternative<ClarificationRequest>(extracted)) {
          answer = std::get<ClarificationRequest>(extracted).message;
          break;
        }
        const auto& ex = std::get<ExtractedZakat>(extracted);
        MetalPrices prices = ex.prices.value_or(opts_.metal_prices);
        auto b = compute_zakat(ex.assets, ex.liabilities, prices);
        std::ostringstream os;
        os << "Nisab threshold: " << format_cents(b.nisab) << ". Net zakatable wealth: "
           << format_cents(b.net_monetary) << ". Zakat due: " << format_cents(b.monetary_due)
           << ".";
        for (const auto& p : b.agriculture_due)
          os << " Produce (" << p.holding.kind << "): " << p.due_kilograms << " kg due ("
             << p.rate_percent << "%).";
        for (const auto& l : b.livestock_due)
          if (!l.due.empty())
            os << " Livestock (" << to_string(l.holding.species) << " x"
               << l.holding.head_count << "): " << l.due << ".";
        for (const auto& w : b.warnings) os << " Note: " << w;
        answer = os.str();
        break;
      }

      case IntentLabel::inheritance_calculation: {
        auto parsed = parse_heirs_text(req.query);
        if (parsed.heirs.empty()) {
          answer =
              "To compute the inheritance I need the list of heirs (for example "
              "\"a wife, 2 sons and a daughter\") and optionally the estate value.";
          break;
        }
        Estate estate{parsed.heirs, parsed.estate_cents.value_or(0)};
        auto outcomes = distribute(estate, req.policy);
        std::ostringstream os;
        for (const auto& o : outcomes) {
          if (outcomes.size() > 1) os << "[" << to_string(o.policy) << "] ";
          bool first = true;
          for (const auto& [name, share] : o.shares) {
            if (!first) os << ", ";
            first = false;
            os << name << ": " << share.fraction.str();
            if (estate.net_estate_cents > 0) os << " (" << format_cents(share.amount_cents) << ")";
          }
          os << "\n";
        }
        answer = os.str();
        break;
      }

      case IntentLabel::quran_retrieval: {
        if (!opts_.quran)
          throw EngineError(route, "quran", "verse store not loaded", false);
        auto subtype = classify_subtype(req.query, opts_.generator, opts_.embedder, trace);
        switch (subtype) {
          case QuranSubtype::specific_verse:
          case QuranSubtype::full_surah: {
            ParsedReference ref = parse_reference(req.query, opts_.embedder);
            std::vector<VerseRecord> records;
            std::string url;
            // an explicit ayah range wins over the subtype guess
            if (ref.ayah_range) {
              auto [r, u] = opts_.quran->fetch_verses(
                  {ref.surah, ref.ayah_range->first, ref.ayah_range->second});
              records = std::move(r);
              url = u;
            } else {
              records = opts_.quran->full_surah(ref.surah);
              url = "https://quran.com/" + std::to_string(ref.surah) + "/1";
              trace.add("quran.fetch", "full surah " + std::to_string(ref.surah));
            }
            std::ostringstream os;
            for (const auto& r : records)
              os << r.ayah_text << " (" << r.surah << ":" << r.ayah << ")\n"
                 << r.translation << "\n";
            answer = os.str();
            citations.push_back({1,
                                 "Quran " + std::to_string(ref.surah) + ":" +
                                     std::to_string(records.empty() ? 1 : records.front().ayah),
                                 url, std::nullopt});
            break;
          }
          case QuranSubtype::statistics: {
            auto plan = nl_to_sql(req.query, opts_.generator, opts_.embedder, trace);
            auto rows = opts_.quran->execute(plan);
            std::ostringstream os;
            if (rows.size() == 1 && rows[0].size() == 1) {
              os << rows[0][0];
            } else {
              for (const auto& row : rows) {
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " | " : "") << row[i];
                os << "\n";
              }
            }
            answer = "Result: " + os.str();
            break;
          }
          case QuranSubtype::interpretation: {
            if (!opts_.documents) {
              answer =
                  "Interpretation requires the reference corpus, which is not "
                  "loaded. Please consult a published tafsir.";
              break;
            }
            RetrievalParams params;
            params.top_k = opts_.config.max_sources;
            auto ranked = opts_.documents->retrieve(req.query, params);
            auto evidence = tag_evidence(ranked);
            auto ga = answer_general(req.query, evidence, opts_.generator, trace,
                                     opts_.config.general_temperature,
                                     opts_.config.fiqh_max_tokens);
            answer = ga.text;
            for (const auto& t : evidence)
              citations.push_back({t.tag, t.chunk.source_title,
                                   t.chunk.source_url.empty()
                                       ? std::optional<std::string>{}
                                       : std::optional<std::string>{t.chunk.source_url},
                                   std::nullopt});
            break;
          }
        }
        break;
      }

      case IntentLabel::fiqh_ruling:
      case IntentLabel::general_islamic: {
        if (!opts_.documents)
          throw EngineError(route, "retrieval", "document corpus not loaded", false);
        RetrievalParams params;
        params.top_k = opts_.config.max_sources;
        auto ranked = opts_.documents->retrieve(req.query, params);
        auto evidence = tag_evidence(ranked);
        GroundedAnswer ga =
            decision.intent == IntentLabel::fiqh_ruling
                ? answer_fiqh(req.query, evidence, opts_.generator, trace,
                              opts_.config.fiqh_temperature, opts_.config.fiqh_max_tokens)
                : answer_general(req.query, evidence, opts_.generator, trace,
                                 opts_.config.general_temperature,
                                 opts_.config.fiqh_max_tokens);
        answer = ga.text;
        if (!ga.abstained)
          for (const auto& t : evidence)
            citations.push_back({t.tag, t.chunk.source_title,
                                 t.chunk.source_url.empty()
                                     ? std::optional<std::string>{}
                                     : std::optional<std::string>{t.chunk.source_url},
                                 std::nullopt});
        break;
      }
    }
  } catch (const EngineError&) {
    throw;
  } catch (const std::exception& e) {
    throw EngineError(route, to_string(decision.intent), e.what(),
                      dynamic_cast<const std::logic_error*>(&e) != nullptr);
  }

  auto response = assemble_response(answer, std::move(citations), std::move(trace), route);
  response.tool_metadata["intent"] = to_string(decision.intent);
  response.tool_metadata["language"] = decision.language;
  response.tool_metadata["confidence"] = std::to_string(decision.confidence);
  response.tool_metadata["origin"] =
      decision.origin == DecisionOrigin::primary ? "primary" : "fallback";
  return response;
}

}  // namespace minaret
