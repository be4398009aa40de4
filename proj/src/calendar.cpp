#include "minaret/calendar.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

namespace minaret {

// ---------------------------------------------------------------------------
// Gregorian <-> Julian day number
// ---------------------------------------------------------------------------

long gregorian_to_jdn(const GregorianDate& d) {
  long a = (14 - d.month) / 12;
  long y = d.year + 4800 - a;
  long m = d.month + 12 * a - 3;
  return d.day + (153 * m + 2) / 5 + 365 * y + y / 4 - y / 100 + y / 400 - 32045;
}

GregorianDate jdn_to_gregorian(long jdn) {
  long a = jdn + 32044;
  long b = (4 * a + 3) / 146097;
  long c = a - 146097 * b / 4;
  long dd = (4 * c + 3) / 1461;
  long e = c - 1461 * dd / 4;
  long m = (5 * e + 2) / 153;
  GregorianDate g;
  g.day = static_cast<int>(e - (153 * m + 2) / 5 + 1);
  g.month = static_cast<int>(m + 3 - 12 * (m / 10));
  g.year = static_cast<int>(100 * b + dd - 4800 + m / 10);
  return g;
}

// ---------------------------------------------------------------------------
// Umm al-Qura table
// ---------------------------------------------------------------------------

namespace umm_al_qura {
namespace {

// Month lengths for AH 1343-1500 as 12-bit masks, bit m-1 set when month m
// has 30 days (otherwise 29). Epoch: 1343-01-01 AH = JDN 2423999
// (1924-08-01 Gregorian). Data from the official KACST/KFUPM tables.
constexpr std::array<unsigned short, 158> kYearMasks = {
    0x555, 0x4ab, 0x95b, 0x2ba, 0x575, 0xbb2, 0x764, 0x749, 0x655, 0x2ab,
    0x55b, 0xada, 0x6d4, 0xec9, 0xd92, 0xd25, 0xa4d, 0x2ad, 0x56d, 0xb6a,
    0xb52, 0xaa5, 0xa4b, 0x497, 0x937, 0x2b6, 0x575, 0xd6a, 0xd52, 0xa96,
    0x92d, 0x25d, 0x4dd, 0xada, 0x5d4, 0xda9, 0xd52, 0xaaa, 0x4d6, 0x9b6,
    0x374, 0x769, 0x752, 0x6a5, 0x54b, 0xaab, 0x55a, 0xad5, 0xdd2, 0xda4,
    0xd49, 0xa95, 0x52d, 0xa5d, 0x55a, 0xad5, 0x6aa, 0x695, 0x52b, 0xa57,
    0x4ae, 0x976, 0x56c, 0xb55, 0xaaa, 0xa55, 0x4ad, 0x95d, 0x2da, 0x5d9,
    0xdb2, 0xba4, 0xb4a, 0xa55, 0x2b5, 0x575, 0xb6a, 0xbd2, 0xbc4, 0xb89,
    0xa95, 0x52d, 0x5ad, 0xb6a, 0x6d4, 0xdc9, 0xd92, 0xaa6, 0x956, 0x2ae,
    0x56d, 0x36a, 0xb55, 0xaaa, 0x94d, 0x49d, 0x95d, 0x2ba, 0x5b5, 0x5aa,
    0xd55, 0xa9a, 0x92e, 0x26e, 0x55d, 0xada, 0x6d4, 0x6a5, 0x54b, 0xa97,
    0x54e, 0xaae, 0x5ac, 0xba9, 0xd92, 0xb25, 0x64b, 0xcab, 0x55a, 0xb55,
    0x6d2, 0xea5, 0xe4a, 0xa95, 0x52d, 0xaad, 0x36c, 0x759, 0x6d2, 0x695,
    0x52d, 0xa5b, 0x4ba, 0x9ba, 0x3b4, 0xb69, 0xb52, 0xaa6, 0x4b6, 0x96d,
    0x2ec, 0x6d9, 0xeb2, 0xd54, 0xd2a, 0xa56, 0x4ae, 0x96d, 0xd6a, 0xb54,
    0xb29, 0xa93, 0x52b, 0xa57, 0x536, 0xab5, 0x6aa, 0xe93,
};

constexpr long kEpochJdn = 2423999;

// Days from the epoch to the start of each tabulated year.
const std::array<long, 159>& year_starts() {
  static const std::array<long, 159> starts = [] {
    std::array<long, 159> s{};
    long acc = 0;
    for (int i = 0; i < 158; ++i) {
      s[i] = acc;
      for (int m = 0; m < 12; ++m) acc += 29 + ((kYearMasks[i] >> m) & 1);
    }
    s[158] = acc;
    return s;
  }();
  return starts;
}

}  // namespace

int month_length(int year, int month) {
  if (year < kFirstYear || year > kLastYear || month < 1 || month > 12)
    throw CalendarError("date outside the supported Umm al-Qura range AH " +
                        std::to_string(kFirstYear) + "-" + std::to_string(kLastYear));
  return 29 + ((kYearMasks[year - kFirstYear] >> (month - 1)) & 1);
}

GregorianDate first_gregorian_day() { return jdn_to_gregorian(kEpochJdn); }
GregorianDate last_gregorian_day() {
  return jdn_to_gregorian(kEpochJdn + year_starts()[158] - 1);
}

}  // namespace umm_al_qura

const char* const kMoonSightingDisclaimerEn =
    "Note: Hijri dates follow the tabular Umm al-Qura calendar and may differ "
    "by a day from local moon-sighting announcements.";
const char* const kMoonSightingDisclaimerAr =
    "ملاحظة: التواريخ الهجرية تتبع تقويم أم القرى الحسابي وقد تختلف يومًا عن "
    "إعلانات رؤية الهلال المحلية.";

HijriConversion gregorian_to_hijri(const GregorianDate& d) {
  using namespace umm_al_qura;
  long offset = gregorian_to_jdn(d) - kEpochJdn;
  const auto& starts = year_starts();
  if (offset < 0 || offset >= starts[158]) {
    auto lo = first_gregorian_day();
    auto hi = last_gregorian_day();
    throw CalendarError(
        "date outside the supported range " + std::to_string(lo.year) + "-" +
        std::to_string(lo.month) + "-" + std::to_string(lo.day) + " to " +
        std::to_string(hi.year) + "-" + std::to_string(hi.month) + "-" +
        std::to_string(hi.day));
  }
  int yi = static_cast<int>(std::upper_bound(starts.begin(), starts.end(), offset) -
                            starts.begin()) - 1;
  long rem = offset - starts[yi];
  int year = kFirstYear + yi;
  int month = 1;
  while (rem >= month_length(year, month)) {
    rem -= month_length(year, month);
    ++month;
  }
  HijriConversion out;
  out.date = {year, month, static_cast<int>(rem) + 1};
  out.disclaimer = true;
  return out;
}

GregorianDate hijri_to_gregorian(const HijriDate& h) {
  using namespace umm_al_qura;
  if (h.year < kFirstYear || h.year > kLastYear)
    throw CalendarError("Hijri year outside the supported range AH " +
                        std::to_string(kFirstYear) + "-" + std::to_string(kLastYear));
  if (h.month < 1 || h.month > 12)
    throw CalendarError("Hijri month must be 1-12");
  int len = month_length(h.year, h.month);
  if (h.day < 1 || h.day > len)
    throw CalendarError("Hijri day " + std::to_string(h.day) + " invalid: month has " +
                        std::to_string(len) + " days");
  long offset = year_starts()[h.year - kFirstYear];
  for (int m = 1; m < h.month; ++m) offset += month_length(h.year, m);
  offset += h.day - 1;
  return jdn_to_gregorian(kEpochJdn + offset);
}

const std::vector<std::string>& hijri_month_names_en() {
  static const std::vector<std::string> names = {
      "Muharram", "Safar",    "Rabi' al-Awwal", "Rabi' al-Thani",
      "Jumada al-Ula", "Jumada al-Akhirah", "Rajab", "Sha'ban",
      "Ramadan",  "Shawwal",  "Dhu al-Qi'dah",  "Dhu al-Hijjah"};
  return names;
}

// ---------------------------------------------------------------------------
// Event ontology
// ---------------------------------------------------------------------------

namespace {

// key, name_ar, name_en, month, day, duration
const char* kSeedOntology =
    "hijri_new_year\tرأس السنة الهجرية\tHijri New Year\t1\t1\t1\n"
    "tasua\tتاسوعاء\tTasu'a\t1\t9\t1\n"
    "ashura\tعاشوراء\tAshura\t1\t10\t1\n"
    "white_days_muharram\tالأيام البيض من محرم\tWhite Days of Muharram\t1\t13\t3\n"
    "mawlid\tالمولد النبوي\tMawlid an-Nabi\t3\t12\t1\n"
    "rajab_start\tبداية شهر رجب\tStart of Rajab\t7\t1\t1\n"
    "isra_miraj\tالإسراء والمعراج\tIsra and Mi'raj\t7\t27\t1\n"
    "nisf_shaban\tليلة النصف من شعبان\tMid-Sha'ban Night\t8\t15\t1\n"
    "ramadan_start\tبداية شهر رمضان\tStart of Ramadan\t9\t1\t30\n"
    "ramadan_last_ten\tالعشر الأواخر من رمضان\tLast Ten Nights of Ramadan\t9\t21\t10\n"
    "laylat_al_qadr\tليلة القدر\tLaylat al-Qadr (27 Ramadan convention)\t9\t27\t1\n"
    "eid_al_fitr\tعيد الفطر\tEid al-Fitr\t10\t1\t3\n"
    "shawwal_fasting\tصيام الست من شوال\tSix Days of Shawwal\t10\t2\t6\n"
    "white_days_shawwal\tالأيام البيض من شوال\tWhite Days of Shawwal\t10\t13\t3\n"
    "dhul_hijjah_first_ten\tالعشر الأوائل من ذي الحجة\tFirst Ten Days of Dhu al-Hijjah\t12\t1\t10\n"
    "hajj_start\tبداية أيام الحج\tStart of Hajj\t12\t8\t1\n"
    "arafah\tيوم عرفة\tDay of Arafah\t12\t9\t1\n"
    "eid_al_adha\tعيد الأضحى\tEid al-Adha\t12\t10\t4\n"
    "tashriq_days\tأيام التشريق\tDays of Tashriq\t12\t11\t3\n"
    "white_days_rajab\tالأيام البيض من رجب\tWhite Days of Rajab\t7\t13\t3\n"
    "white_days_shaban\tالأيام البيض من شعبان\tWhite Days of Sha'ban\t8\t13\t3\n";

}  // namespace

EventOntology::EventOntology() { parse(kSeedOntology); }

EventOntology EventOntology::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CalendarError("cannot open event ontology file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  EventOntology o;
  o.events_.clear();
  o.parse(ss.str());
  return o;
}

void EventOntology::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    IslamicEvent e;
    std::string month, day, dur;
    if (!std::getline(ls, e.key, '\t') || !std::getline(ls, e.name_ar, '\t') ||
        !std::getline(ls, e.name_en, '\t') || !std::getline(ls, month, '\t') ||
        !std::getline(ls, day, '\t') || !std::getline(ls, dur))
      continue;
    e.hijri_month = std::stoi(month);
    e.hijri_day = std::stoi(day);
    e.duration_days = std::stoi(dur);
    events_.push_back(std::move(e));
  }
}

std::optional<IslamicEvent> EventOntology::find(const std::string& key) const {
  for (const auto& e : events_)
    if (e.key == key) return e;
  return std::nullopt;
}

std::vector<std::string> EventOntology::known_keys() const {
  std::vector<std::string> keys;
  for (const auto& e : events_) keys.push_back(e.key);
  return keys;
}

GregorianDate EventOntology::next_occurrence(const std::string& key,
                                             const GregorianDate& today) const {
  auto e = find(key);
  if (!e) {
    std::string known;
    for (const auto& k : known_keys()) known += (known.empty() ? "" : ", ") + k;
    throw CalendarError("unknown event '" + key + "'; known events: " + known);
  }
  HijriDate today_h = gregorian_to_hijri(today).date;
  HijriDate occ{today_h.year, e->hijri_month, e->hijri_day};
  auto clamp_day = [](HijriDate h) {
    h.day = std::min(h.day, umm_al_qura::month_length(h.year, h.month));
    return h;
  };
  if (HijriDate cand = clamp_day(occ); cand < today_h)
    occ.year += 1;  // already past this Hijri year
  return hijri_to_gregorian(clamp_day(occ));
}

std::vector<std::pair<IslamicEvent, GregorianDate>> EventOntology::upcoming(
    const GregorianDate& today, int limit) const {
  std::vector<std::pair<IslamicEvent, GregorianDate>> all;
  for (const auto& e : events_) all.emplace_back(e, next_occurrence(e.key, today));
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  if (static_cast<int>(all.size()) > limit) all.resize(limit);
  return all;
}

// ---------------------------------------------------------------------------
// Language detection, greetings, query-kind detection
// ---------------------------------------------------------------------------

namespace {

std::vector<uint32_t> codepoints(const std::string& s) {
  std::vector<uint32_t> cps;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = s[i];
    uint32_t cp = c;
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) { cp = c & 0x1F; len = 2; }
    else if ((c & 0xF0) == 0xE0) { cp = c & 0x0F; len = 3; }
    else if ((c & 0xF8) == 0xF0) { cp = c & 0x07; len = 4; }
    if (i + len > s.size()) { len = 1; cp = c; }
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = s[i + k];
      if ((cc & 0xC0) != 0x80) { len = 1; cp = c; break; }
      cp = (cp << 6) | (cc & 0x3F);
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

bool is_ws(uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

bool contains_any(const std::string& lower, std::initializer_list<const char*> needles) {
  for (const char* n : needles)
    if (lower.find(n) != std::string::npos) return true;
  return false;
}

std::string to_lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c += 32;
  return out;
}

}  // namespace

std::string detect_language_ratio(const std::string& text, ExecutionTrace* trace) {
  std::size_t arabic = 0, total = 0;
  for (uint32_t cp : codepoints(text)) {
    if (is_ws(cp)) continue;
    ++total;
    if (cp >= 0x0600 && cp <= 0x06FF) ++arabic;
  }
  if (total == 0) {
    if (trace) trace->warn("language detection on whitespace-only input; defaulting to en");
    return "en";
  }
  return (static_cast<double>(arabic) / static_cast<double>(total) > 0.30) ? "ar" : "en";
}

std::string truncate_sentences(const std::string& text, int max_sentences) {
  int count = 0;
  auto cps = codepoints(text);
  std::string out;
  out.reserve(text.size());
  // Re-encode as we copy so the cut lands on a codepoint boundary.
  auto append_cp = [&out](uint32_t cp) {
    if (cp < 0x80) out.push_back(static_cast<char>(cp));
    else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  };
  for (uint32_t cp : cps) {
    append_cp(cp);
    if (cp == '.' || cp == '!' || cp == '?' || cp == 0x061F /* ؟ */) {
      if (++count >= max_sentences) break;
    }
  }
  return out;
}

std::string greet(const std::string& query, TextGenerator& generator,
                  double temperature, int max_tokens, ExecutionTrace& trace) {
  std::string lang = detect_language_ratio(query, &trace);
  std::string prompt =
      "Respond with a short Islamic greeting, culturally appropriate, at most two sentences, " +
      std::string(lang == "ar" ? "in Arabic" : "in English") +
      ", followed by an offer to assist with Islamic knowledge.\nUser said: " + query;
  try {
    std::string reply = generator.generate(prompt, temperature, max_tokens);
    trace.add("greeting", "provider reply in " + lang);
    return truncate_sentences(reply, 2);
  } catch (const std::exception& e) {
    trace.warn(std::string("greeting provider failed: ") + e.what());
    if (lang == "ar")
      return "وعليكم السلام ورحمة الله وبركاته. كيف أستطيع مساعدتك؟";
    return "Wa alaikum assalam! How can I help you with Islamic knowledge today?";
  }
}

std::string to_string(CalendarQueryKind kind) {
  switch (kind) {
    case CalendarQueryKind::current_hijri: return "current_hijri";
    case CalendarQueryKind::greg_to_hijri: return "greg_to_hijri";
    case CalendarQueryKind::hijri_to_greg: return "hijri_to_greg";
    case CalendarQueryKind::event_date: return "event_date";
    case CalendarQueryKind::upcoming_events: return "upcoming_events";
  }
  return "current_hijri";
}

CalendarQueryKind detect_calendar_kind(const std::string& query, ExecutionTrace* trace) {
  std::string q = to_lower_ascii(query);
  bool mentions_hijri = contains_any(q, {"hijri", "هجري", "الهجري", "هجرية"});
  bool mentions_greg = contains_any(q, {"gregorian", "ميلادي", "الميلادي", "ميلادية"});
  if (contains_any(q, {"upcoming", "next events", "coming up", "الأحداث القادمة",
                       "المناسبات القادمة"}))
    return CalendarQueryKind::upcoming_events;
  if (contains_any(q, {"convert", "حول", "تحويل"}) || (mentions_hijri && mentions_greg)) {
    if (mentions_greg && !mentions_hijri) return CalendarQueryKind::hijri_to_greg;
    return CalendarQueryKind::greg_to_hijri;
  }
  if (contains_any(q, {"ramadan", "eid", "ashura", "mawlid", "arafah", "laylat",
                       "رمضان", "عيد", "عاشوراء", "مولد", "عرفة", "ليلة القدر"}) &&
      contains_any(q, {"when", "متى", "date of", "تاريخ"}))
    return CalendarQueryKind::event_date;
  if (contains_any(q, {"when is", "متى"}) &&
      contains_any(q, {"ramadan", "eid", "رمضان", "عيد"}))
    return CalendarQueryKind::event_date;
  if (mentions_greg && !mentions_hijri) return CalendarQueryKind::hijri_to_greg;
  if (trace && !mentions_hijri)
    trace->add("calendar.kind", "ambiguous query; defaulting to current_hijri");
  return CalendarQueryKind::current_hijri;
}

}  // namespace minaret
