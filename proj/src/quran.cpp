#include "minaret/quran.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>
#include <sqlite3.h>

namespace minaret {
namespace {

// --- UTF-8 helpers -----------------------------------------------------

std::vector<char32_t> utf8_decode(const std::string& s) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    char32_t cp = 0;
    int len = 1;
    if (c < 0x80) cp = c;
    else if ((c & 0xE0) == 0xC0) { cp = c & 0x1F; len = 2; }
    else if ((c & 0xF0) == 0xE0) { cp = c & 0x0F; len = 3; }
    else if ((c & 0xF8) == 0xF0) { cp = c & 0x07; len = 4; }
    else { ++i; continue; }
    if (i + len > s.size()) break;
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      unsigned char cc = s[i + k];
      if ((cc & 0xC0) != 0x80) { ok = false; break; }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok) out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) out += static_cast<char>(cp);
  else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_diacritic(char32_t cp) {
  return (cp >= 0x0610 && cp <= 0x061A) || (cp >= 0x064B && cp <= 0x065F) ||
         cp == 0x0670 || (cp >= 0x06D6 && cp <= 0x06ED) || cp == 0x0640 ||
         (cp >= 0x08D3 && cp <= 0x08FF);
}

bool is_arabic_letter(char32_t cp) {
  return (cp >= 0x0621 && cp <= 0x064A) || (cp >= 0x0671 && cp <= 0x06D3);
}

// Name key for matching: ASCII lowercased letters plus normalized Arabic
// letters, everything else dropped, leading article ("al" / alif-lam)
// and a leading "surah"/Arabic equivalent stripped.
std::string normalize_name(const std::string& raw) {
  std::u32string buf;
  for (char32_t cp : utf8_decode(raw)) {
    if (cp < 0x80 && std::isalpha(static_cast<int>(cp))) {
      buf += static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    } else if (is_arabic_letter(cp)) {
      if (cp == 0x0622 || cp == 0x0623 || cp == 0x0625 || cp == 0x0671) cp = 0x0627;
      if (cp == 0x0649) cp = 0x064A;
      buf += cp;
    }
  }
  auto strip_prefix = [&](std::u32string_view pre) {
    if (buf.size() > pre.size() && buf.compare(0, pre.size(), pre) == 0)
      buf.erase(0, pre.size());
  };
  strip_prefix(U"surah");
  strip_prefix(U"sura");
  strip_prefix(U"\u0633\u0648\u0631\u0629");  // سورة
  strip_prefix(U"al");
  strip_prefix(U"\u0627\u0644");  // ال
  std::string out;
  for (char32_t cp : buf) utf8_append(out, cp);
  return out;
}

double edit_similarity(const std::string& a8, const std::string& b8) {
  auto a = utf8_decode(a8);
  auto b = utf8_decode(b8);
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[b.size()]);
  double len = static_cast<double>(std::max(a.size(), b.size()));
  return len == 0 ? 1.0 : 1.0 - dist / len;
}

std::string arabic_digits_to_ascii(const std::string& s) {
  std::string out;
  for (char32_t cp : utf8_decode(s)) {
    if (cp >= 0x0660 && cp <= 0x0669) cp = '0' + (cp - 0x0660);       // ٠..٩
    else if (cp >= 0x06F0 && cp <= 0x06F9) cp = '0' + (cp - 0x06F0);  // ۰..۹
    utf8_append(out, cp);
  }
  return out;
}

std::string sql_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

}  // namespace

// --- Canonical surah metadata ------------------------------------------

const std::vector<SurahInfo>& surah_catalog() {
  static const std::vector<SurahInfo> catalog = {
    {"Al-Fatihah", "الفاتحة", "The Opener", 7, "Meccan"},
    {"Al-Baqarah", "البقرة", "The Cow", 286, "Medinan"},
    {"Ali 'Imran", "آل عمران", "Family of Imran", 200, "Medinan"},
    {"An-Nisa", "النساء", "The Women", 176, "Medinan"},
    {"Al-Ma'idah", "المائدة", "The Table Spread", 120, "Medinan"},
    {"Al-An'am", "الأنعام", "The Cattle", 165, "Meccan"},
    {"Al-A'raf", "الأعراف", "The Heights", 206, "Meccan"},
    {"Al-Anfal", "الأنفال", "The Spoils of War", 75, "Medinan"},
    {"At-Tawbah", "التوبة", "The Repentance", 129, "Medinan"},
    {"Yunus", "يونس", "Jonah", 109, "Meccan"},
    {"Hud", "هود", "Hud", 123, "Meccan"},
    {"Yusuf", "يوسف", "Joseph", 111, "Meccan"},
    {"Ar-Ra'd", "الرعد", "The Thunder", 43, "Medinan"},
    {"Ibrahim", "ابراهيم", "Abraham", 52, "Meccan"},
    {"Al-Hijr", "الحجر", "The Rocky Tract", 99, "Meccan"},
    {"An-Nahl", "النحل", "The Bee", 128, "Meccan"},
    {"Al-Isra", "الإسراء", "The Night Journey", 111, "Meccan"},
    {"Al-Kahf", "الكهف", "The Cave", 110, "Meccan"},
    {"Maryam", "مريم", "Mary", 98, "Meccan"},
    {"Taha", "طه", "Ta-Ha", 135, "Meccan"},
    {"Al-Anbya", "الأنبياء", "The Prophets", 112, "Meccan"},
    {"Al-Hajj", "الحج", "The Pilgrimage", 78, "Medinan"},
    {"Al-Mu'minun", "المؤمنون", "The Believers", 118, "Meccan"},
    {"An-Nur", "النور", "The Light", 64, "Medinan"},
    {"Al-Furqan", "الفرقان", "The Criterion", 77, "Meccan"},
    {"Ash-Shu'ara", "الشعراء", "The Poets", 227, "Meccan"},
    {"An-Naml", "النمل", "The Ant", 93, "Meccan"},
    {"Al-Qasas", "القصص", "The Stories", 88, "Meccan"},
    {"Al-'Ankabut", "العنكبوت", "The Spider", 69, "Meccan"},
    {"Ar-Rum", "الروم", "The Romans", 60, "Meccan"},
    {"Luqman", "لقمان", "Luqman", 34, "Meccan"},
    {"As-Sajdah", "السجدة", "The Prostration", 30, "Meccan"},
    {"Al-Ahzab", "الأحزاب", "The Combined Forces", 73, "Medinan"},
    {"Saba", "سبإ", "Sheba", 54, "Meccan"},
    {"Fatir", "فاطر", "Originator", 45, "Meccan"},
    {"Ya-Sin", "يس", "Ya Sin", 83, "Meccan"},
    {"As-Saffat", "الصافات", "Those who set the Ranks", 182, "Meccan"},
    {"Sad", "ص", "The Letter \"Saad\"", 88, "Meccan"},
    {"Az-Zumar", "الزمر", "The Troops", 75, "Meccan"},
    {"Ghafir", "غافر", "The Forgiver", 85, "Meccan"},
    {"Fussilat", "فصلت", "Explained in Detail", 54, "Meccan"},
    {"Ash-Shuraa", "الشورى", "The Consultation", 53, "Meccan"},
    {"Az-Zukhruf", "الزخرف", "The Ornaments of Gold", 89, "Meccan"},
    {"Ad-Dukhan", "الدخان", "The Smoke", 59, "Meccan"},
    {"Al-Jathiyah", "الجاثية", "The Crouching", 37, "Meccan"},
    {"Al-Ahqaf", "الأحقاف", "The Wind-Curved Sandhills", 35, "Meccan"},
    {"Muhammad", "محمد", "Muhammad", 38, "Medinan"},
    {"Al-Fath", "الفتح", "The Victory", 29, "Medinan"},
    {"Al-Hujurat", "الحجرات", "The Rooms", 18, "Medinan"},
    {"Qaf", "ق", "The Letter \"Qaf\"", 45, "Meccan"},
    {"Adh-Dhariyat", "الذاريات", "The Winnowing Winds", 60, "Meccan"},
    {"At-Tur", "الطور", "The Mount", 49, "Meccan"},
    {"An-Najm", "النجم", "The Star", 62, "Meccan"},
    {"Al-Qamar", "القمر", "The Moon", 55, "Meccan"},
    {"Ar-Rahman", "الرحمن", "The Beneficent", 78, "Medinan"},
    {"Al-Waqi'ah", "الواقعة", "The Inevitable", 96, "Meccan"},
    {"Al-Hadid", "الحديد", "The Iron", 29, "Medinan"},
    {"Al-Mujadila", "المجادلة", "The Pleading Woman", 22, "Medinan"},
    {"Al-Hashr", "الحشر", "The Exile", 24, "Medinan"},
    {"Al-Mumtahanah", "الممتحنة", "She that is to be examined", 13, "Medinan"},
    {"As-Saf", "الصف", "The Ranks", 14, "Medinan"},
    {"Al-Jumu'ah", "الجمعة", "The Congregation, Friday", 11, "Medinan"},
    {"Al-Munafiqun", "المنافقون", "The Hypocrites", 11, "Medinan"},
    {"At-Taghabun", "التغابن", "The Mutual Disillusion", 18, "Medinan"},
    {"At-Talaq", "الطلاق", "The Divorce", 12, "Medinan"},
    {"At-Tahrim", "التحريم", "The Prohibition", 12, "Medinan"},
    {"Al-Mulk", "الملك", "The Sovereignty", 30, "Meccan"},
    {"Al-Qalam", "القلم", "The Pen", 52, "Meccan"},
    {"Al-Haqqah", "الحاقة", "The Reality", 52, "Meccan"},
    {"Al-Ma'arij", "المعارج", "The Ascending Stairways", 44, "Meccan"},
    {"Nuh", "نوح", "Noah", 28, "Meccan"},
    {"Al-Jinn", "الجن", "The Jinn", 28, "Meccan"},
    {"Al-Muzzammil", "المزمل", "The Enshrouded One", 20, "Meccan"},
    {"Al-Muddaththir", "المدثر", "The Cloaked One", 56, "Meccan"},
    {"Al-Qiyamah", "القيامة", "The Resurrection", 40, "Meccan"},
    {"Al-Insan", "الانسان", "The Man", 31, "Medinan"},
    {"Al-Mursalat", "المرسلات", "The Emissaries", 50, "Meccan"},
    {"An-Naba", "النبإ", "The Tidings", 40, "Meccan"},
    {"An-Nazi'at", "النازعات", "Those who drag forth", 46, "Meccan"},
    {"'Abasa", "عبس", "He Frowned", 42, "Meccan"},
    {"At-Takwir", "التكوير", "The Overthrowing", 29, "Meccan"},
    {"Al-Infitar", "الإنفطار", "The Cleaving", 19, "Meccan"},
    {"Al-Mutaffifin", "المطففين", "The Defrauding", 36, "Meccan"},
    {"Al-Inshiqaq", "الإنشقاق", "The Sundering", 25, "Meccan"},
    {"Al-Buruj", "البروج", "The Mansions of the Stars", 22, "Meccan"},
    {"At-Tariq", "الطارق", "The Nightcommer", 17, "Meccan"},
    {"Al-A'la", "الأعلى", "The Most High", 19, "Meccan"},
    {"Al-Ghashiyah", "الغاشية", "The Overwhelming", 26, "Meccan"},
    {"Al-Fajr", "الفجر", "The Dawn", 30, "Meccan"},
    {"Al-Balad", "البلد", "The City", 20, "Meccan"},
    {"Ash-Shams", "الشمس", "The Sun", 15, "Meccan"},
    {"Al-Layl", "الليل", "The Night", 21, "Meccan"},
    {"Ad-Duhaa", "الضحى", "The Morning Hours", 11, "Meccan"},
    {"Ash-Sharh", "الشرح", "The Relief", 8, "Meccan"},
    {"At-Tin", "التين", "The Fig", 8, "Meccan"},
    {"Al-'Alaq", "العلق", "The Clot", 19, "Meccan"},
    {"Al-Qadr", "القدر", "The Power", 5, "Meccan"},
    {"Al-Bayyinah", "البينة", "The Clear Proof", 8, "Medinan"},
    {"Az-Zalzalah", "الزلزلة", "The Earthquake", 8, "Medinan"},
    {"Al-'Adiyat", "العاديات", "The Courser", 11, "Meccan"},
    {"Al-Qari'ah", "القارعة", "The Calamity", 11, "Meccan"},
    {"At-Takathur", "التكاثر", "The Rivalry in world increase", 8, "Meccan"},
    {"Al-'Asr", "العصر", "The Declining Day", 3, "Meccan"},
    {"Al-Humazah", "الهمزة", "The Traducer", 9, "Meccan"},
    {"Al-Fil", "الفيل", "The Elephant", 5, "Meccan"},
    {"Quraysh", "قريش", "Quraysh", 4, "Meccan"},
    {"Al-Ma'un", "الماعون", "The Small kindnesses", 7, "Meccan"},
    {"Al-Kawthar", "الكوثر", "The Abundance", 3, "Meccan"},
    {"Al-Kafirun", "الكافرون", "The Disbelievers", 6, "Meccan"},
    {"An-Nasr", "النصر", "The Divine Support", 3, "Medinan"},
    {"Al-Masad", "المسد", "The Palm Fiber", 5, "Meccan"},
    {"Al-Ikhlas", "الإخلاص", "The Sincerity", 4, "Meccan"},
    {"Al-Falaq", "الفلق", "The Daybreak", 5, "Meccan"},
    {"An-Nas", "الناس", "Mankind", 6, "Meccan"},
  };
  return catalog;
}

std::string strip_diacritics(const std::string& uthmani) {
  std::string out;
  for (char32_t cp : utf8_decode(uthmani)) {
    if (is_diacritic(cp)) continue;
    if (cp == 0x0671) cp = 0x0627;  // wasla to plain alif
    utf8_append(out, cp);
  }
  return out;
}

std::string to_string(QuranSubtype s) {
  switch (s) {
    case QuranSubtype::specific_verse: return "specific_verse";
    case QuranSubtype::full_surah: return "full_surah";
    case QuranSubtype::statistics: return "statistics";
    case QuranSubtype::interpretation: return "interpretation";
  }
  return "";
}

std::optional<QuranSubtype> parse_subtype(const std::string& s) {
  for (QuranSubtype t : {QuranSubtype::specific_verse, QuranSubtype::full_surah,
                         QuranSubtype::statistics, QuranSubtype::interpretation})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

// --- Surah resolution ---------------------------------------------------

namespace {

struct NameIndex {
  // normalized name -> surah number, plus per-surah normalized candidates
  std::vector<std::pair<std::string, int>> entries;
};

const NameIndex& name_index() {
  static const NameIndex idx = [] {
    NameIndex n;
    const auto& cat = surah_catalog();
    for (std::size_t i = 0; i < cat.size(); ++i) {
      n.entries.emplace_back(normalize_name(cat[i].transliteration), static_cast<int>(i + 1));
      n.entries.emplace_back(normalize_name(cat[i].arabic_name), static_cast<int>(i + 1));
    }
    return n;
  }();
  return idx;
}

}  // namespace

int resolve_surah(const std::string& name, Embedder* embedder) {
  std::string key = normalize_name(name);
  if (key.empty())
    throw SurahUnresolved("empty surah name", {});

  for (const auto& [cand, num] : name_index().entries)
    if (cand == key) return num;

  std::vector<float> key_vec;
  if (embedder) key_vec = embedder->embed(key);

  // score per surah: best over its candidate names of
  // max(edit similarity, embedding cosine)
  std::vector<std::pair<double, int>> scored;  // (-score, surah) for sorting
  std::vector<double> best(115, 0.0);
  for (const auto& [cand, num] : name_index().entries) {
    double s = edit_similarity(key, cand);
    if (embedder) s = std::max(s, cosine(key_vec, embedder->embed(cand)));
    best[num] = std::max(best[num], s);
  }
  for (int n = 1; n <= 114; ++n) scored.emplace_back(-best[n], n);
  std::sort(scored.begin(), scored.end());

  if (-scored[0].first >= 0.6) return scored[0].second;

  std::vector<std::string> suggestions;
  for (int i = 0; i < 3; ++i)
    suggestions.push_back(surah_catalog()[scored[i].second - 1].transliteration);
  throw SurahUnresolved("could not resolve surah name: " + name, suggestions);
}

// --- Reference parsing --------------------------------------------------

ParsedReference parse_reference(const std::string& query, Embedder* embedder) {
  std::string q = arabic_digits_to_ascii(query);
  ParsedReference out;

  static const std::regex numeric(R"((\d{1,3})\s*:\s*(\d{1,4})(?:\s*-\s*(\d{1,4}))?)");
  std::smatch m;
  if (std::regex_search(q, m, numeric)) {
    int s = std::stoi(m[1]);
    if (s < 1 || s > 114)
      throw QuranError("surah number " + m[1].str() +
                       " is out of range; the Quran has 114 surahs (1-114)");
    int a = std::stoi(m[2]);
    int b = m[3].matched ? std::stoi(m[3]) : a;
    out.surah = s;
    out.ayah_range = {a, b};
    return out;
  }

  // Named form "Al-Baqarah:275" (name before the colon).
  static const std::regex named(R"(([A-Za-z][A-Za-z' \-]{1,40}?)\s*:\s*(\d{1,4})(?:\s*-\s*(\d{1,4}))?)");
  if (std::regex_search(q, m, named)) {
    try {
      out.surah = resolve_surah(m[1], embedder);
      int a = std::stoi(m[2]);
      int b = m[3].matched ? std::stoi(m[3]) : a;
      out.ayah_range = {a, b};
      return out;
    } catch (const SurahUnresolved&) {
      // fall through to the verbose forms
    }
  }

  // Verbose: surah by number or name, ayah by separate keyword.
  std::optional<int> surah;
  static const std::regex surah_num(
      R"((?:[Ss]urah?|[Cc]hapter|سورة)\s+(\d{1,3}))");
  static const std::regex surah_name(
      R"((?:[Ss]urah?|[Cc]hapter|سورة)\s+([^\s,.;:?!]+(?:[ \-][^\s,.;:?!]+)?))");
  if (std::regex_search(q, m, surah_num)) {
    int s = std::stoi(m[1]);
    if (s < 1 || s > 114)
      throw QuranError("surah number " + m[1].str() +
                       " is out of range; the Quran has 114 surahs (1-114)");
    surah = s;
  } else if (std::regex_search(q, m, surah_name)) {
    std::string captured = m[1];
    try {
      surah = resolve_surah(captured, embedder);
    } catch (const SurahUnresolved&) {
      // try just the first token of the capture
      auto sp = captured.find_first_of(" -");
      if (sp != std::string::npos) {
        try { surah = resolve_surah(captured.substr(0, sp), embedder); }
        catch (const SurahUnresolved&) {}
      }
    }
  }

  static const std::regex ayah_re(
      R"((?:[Vv]erses?|[Aa]yahs?|[Aa]yat?|آية|الآية|اية|الآيات|آيات)\D{0,10}?(\d{1,4})(?:\s*(?:-|to|إلى)\s*(\d{1,4}))?)");
  std::optional<std::pair<int, int>> range;
  if (std::regex_search(q, m, ayah_re)) {
    int a = std::stoi(m[1]);
    int b = m[2].matched ? std::stoi(m[2]) : a;
    range = {{a, b}};
  }

  if (surah) {
    out.surah = *surah;
    out.ayah_range = range;  // may be empty: surah-level partial result
    return out;
  }

  throw QuranError(
      "could not parse a verse reference; accepted formats: \"2:275\", "
      "\"2:1-5\", \"Al-Baqarah:275\", \"Surah 2 Verse 275\", or the Arabic "
      "equivalents");
}

// --- Store --------------------------------------------------------------

QuranStore::QuranStore(const std::string& db_path, bool read_only) {
  int flags = read_only ? SQLITE_OPEN_READONLY : (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  if (sqlite3_open_v2(db_path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "open failed";
    if (db_) sqlite3_close(db_);
    db_ = nullptr;
    throw QuranError("cannot open verse store " + db_path + ": " + msg);
  }
}

QuranStore::~QuranStore() {
  if (db_) sqlite3_close(db_);
}

namespace {

struct Stmt {
  sqlite3_stmt* p = nullptr;
  Stmt(sqlite3* db, const std::string& sql) {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &p, nullptr) != SQLITE_OK)
      throw QuranError(std::string("sql error: ") + sqlite3_errmsg(db));
  }
  ~Stmt() { sqlite3_finalize(p); }
};

VerseRecord read_record(sqlite3_stmt* st) {
  VerseRecord r;
  r.id = sqlite3_column_int64(st, 0);
  r.surah = sqlite3_column_int(st, 1);
  r.ayah = sqlite3_column_int(st, 2);
  auto text = [&](int col) {
    const unsigned char* t = sqlite3_column_text(st, col);
    return t ? std::string(reinterpret_cast<const char*>(t)) : std::string();
  };
  r.ayah_text = text(3);
  r.simple_text = text(4);
  r.translation = text(5);
  r.juz = sqlite3_column_int(st, 6);
  r.revelation = text(7);
  return r;
}

}  // namespace

int QuranStore::verse_count(int surah) const {
  Stmt st(db_, "SELECT COUNT(*) FROM Quran WHERE Surah = ?");
  sqlite3_bind_int(st.p, 1, surah);
  if (sqlite3_step(st.p) != SQLITE_ROW) throw QuranError("count query failed");
  return sqlite3_column_int(st.p, 0);
}

long long QuranStore::total_verses() const {
  Stmt st(db_, "SELECT COUNT(*) FROM Quran");
  if (sqlite3_step(st.p) != SQLITE_ROW) throw QuranError("count query failed");
  return sqlite3_column_int64(st.p, 0);
}

std::pair<std::vector<VerseRecord>, std::string> QuranStore::fetch_verses(
    const VerseRef& ref) const {
  if (ref.surah < 1 || ref.surah > 114)
    throw QuranError("surah " + std::to_string(ref.surah) +
                     " is out of range; valid surahs are 1-114");
  int count = verse_count(ref.surah);
  if (ref.ayah_start < 1 || ref.ayah_end < ref.ayah_start || ref.ayah_end > count)
    throw QuranError("ayah range " + std::to_string(ref.ayah_start) + "-" +
                     std::to_string(ref.ayah_end) + " is out of bounds; surah " +
                     std::to_string(ref.surah) + " has " + std::to_string(count) +
                     " verses");
  Stmt st(db_,
          "SELECT ID, Surah, Ayah, AyahText, SimpleText, Translation, Juz, Revelation "
          "FROM Quran WHERE Surah = ? AND Ayah BETWEEN ? AND ? ORDER BY Ayah");
  sqlite3_bind_int(st.p, 1, ref.surah);
  sqlite3_bind_int(st.p, 2, ref.ayah_start);
  sqlite3_bind_int(st.p, 3, ref.ayah_end);
  std::vector<VerseRecord> rows;
  while (sqlite3_step(st.p) == SQLITE_ROW) rows.push_back(read_record(st.p));
  std::string url = "https://quran.com/" + std::to_string(ref.surah) + "/" +
                    std::to_string(ref.ayah_start);
  return {rows, url};
}

std::vector<VerseRecord> QuranStore::full_surah(int surah) const {
  if (surah < 1 || surah > 114)
    throw QuranError("surah " + std::to_string(surah) + " is out of range; valid surahs are 1-114");
  Stmt st(db_,
          "SELECT ID, Surah, Ayah, AyahText, SimpleText, Translation, Juz, Revelation "
          "FROM Quran WHERE Surah = ? ORDER BY Ayah");
  sqlite3_bind_int(st.p, 1, surah);
  std::vector<VerseRecord> rows;
  while (sqlite3_step(st.p) == SQLITE_ROW) rows.push_back(read_record(st.p));
  return rows;
}

std::vector<std::vector<std::string>> QuranStore::execute(const SqlPlan& plan) const {
  if (!plan.read_only) throw QuranError("refusing to execute a non-validated plan");
  Stmt st(db_, plan.statement);
  std::vector<std::vector<std::string>> rows;
  int rc;
  while ((rc = sqlite3_step(st.p)) == SQLITE_ROW) {
    std::vector<std::string> row;
    int n = sqlite3_column_count(st.p);
    for (int c = 0; c < n; ++c) {
      const unsigned char* t = sqlite3_column_text(st.p, c);
      row.push_back(t ? reinterpret_cast<const char*>(t) : "NULL");
    }
    rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE)
    throw QuranError(std::string("execution failed: ") + sqlite3_errmsg(db_));
  return rows;
}

// --- Ingestion ----------------------------------------------------------

namespace {

// Standard 30-part division, as (surah, first ayah of the juz).
constexpr std::pair<int, int> kJuzStarts[30] = {
    {1, 1},   {2, 142}, {2, 253}, {3, 93},  {4, 24},  {4, 148}, {5, 82},
    {6, 111}, {7, 88},  {8, 41},  {9, 93},  {11, 6},  {12, 53}, {15, 1},
    {17, 1},  {18, 75}, {21, 1},  {23, 1},  {25, 21}, {27, 56}, {29, 46},
    {33, 31}, {36, 28}, {39, 32}, {41, 47}, {46, 1},  {51, 31}, {58, 1},
    {67, 1},  {78, 1}};

int juz_of(int surah, int ayah) {
  int juz = 1;
  for (int j = 0; j < 30; ++j) {
    auto [s, a] = kJuzStarts[j];
    if (surah > s || (surah == s && ayah >= a)) juz = j + 1;
  }
  return juz;
}

}  // namespace

void ingest_quran(const std::string& corpus_json_path, const std::string& db_path) {
  std::ifstream in(corpus_json_path);
  if (!in) throw QuranError("cannot read corpus file " + corpus_json_path);
  nlohmann::json corpus = nlohmann::json::parse(in);
  if (!corpus.is_array() || corpus.size() != 114)
    throw QuranError("corpus must contain exactly 114 surahs, got " +
                     std::to_string(corpus.size()));

  QuranStore store(db_path, /*read_only=*/false);
  sqlite3* db = store.handle();
  char* err = nullptr;
  auto exec = [&](const char* sql) {
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown";
      sqlite3_free(err);
      throw QuranError("ingestion sql failed: " + msg);
    }
  };
  exec("DROP TABLE IF EXISTS Quran");
  exec(
      "CREATE TABLE Quran ("
      " ID INTEGER PRIMARY KEY,"
      " Surah INTEGER,"
      " Ayah INTEGER,"
      " AyahText TEXT,"
      " SimpleText TEXT,"
      " Translation TEXT,"
      " Juz INTEGER,"
      " Revelation TEXT)");
  exec("CREATE UNIQUE INDEX idx_surah_ayah ON Quran(Surah, Ayah)");
  exec("BEGIN");

  Stmt ins(db,
           "INSERT INTO Quran (ID, Surah, Ayah, AyahText, SimpleText, Translation, Juz, "
           "Revelation) VALUES (?, ?, ?, ?, ?, ?, ?, ?)");
  long long id = 0;
  long long total = 0;
  for (const auto& chapter : corpus) {
    int surah = chapter.at("id").get<int>();
    if (surah < 1 || surah > 114) throw QuranError("surah id out of range in corpus");
    std::string revelation =
        chapter.at("type").get<std::string>() == "meccan" ? "Meccan" : "Medinan";
    const auto& verses = chapter.at("verses");
    if (static_cast<int>(verses.size()) != chapter.at("total_verses").get<int>())
      throw QuranError("verse count mismatch in surah " + std::to_string(surah));
    for (const auto& v : verses) {
      int ayah = v.at("id").get<int>();
      std::string text = v.at("text").get<std::string>();
      std::string translation = v.at("translation").get<std::string>();
      std::string simple = strip_diacritics(text);
      sqlite3_reset(ins.p);
      sqlite3_bind_int64(ins.p, 1, ++id);
      sqlite3_bind_int(ins.p, 2, surah);
      sqlite3_bind_int(ins.p, 3, ayah);
      sqlite3_bind_text(ins.p, 4, text.c_str(), -1, SQLITE_TRANSIENT);
      sqlite3_bind_text(ins.p, 5, simple.c_str(), -1, SQLITE_TRANSIENT);
      sqlite3_bind_text(ins.p, 6, translation.c_str(), -1, SQLITE_TRANSIENT);
      sqlite3_bind_int(ins.p, 7, juz_of(surah, ayah));
      sqlite3_bind_text(ins.p, 8, revelation.c_str(), -1, SQLITE_TRANSIENT);
      if (sqlite3_step(ins.p) != SQLITE_DONE)
        throw QuranError(std::string("insert failed: ") + sqlite3_errmsg(db));
      ++total;
    }
  }
  exec("COMMIT");
  if (total != 6236)
    throw QuranError("ingested corpus has " + std::to_string(total) +
                     " verses; the Hafs reading requires 6236");
}

// --- Subtype classification --------------------------------------------

const char* kSubtypePromptTemplate =
    "You are an expert at classifying **Quran-related questions**.\n"
    "\n"
    "Classify the user's Quran question into **ONE** of these sub-types:\n"
    "\n"
    "1. **specific_verse**: Asking for a specific verse by number or reference\n"
    "   Examples:\n"
    "   - \"What does verse 2:255 say?\"\n"
    "   - \"Show me ayah 7 of Al-Fatiha\"\n"
    "   - \"اكتب الآية 275 من سورة البقرة\"\n"
    "   - \"ما هي آخر ثلاث آيات من سورة البقرة؟\"\n"
    "   - \"What are the last three verses of Surah Al-Baqarah?\"\n"
    "\n"
    "2. **full_surah**: Asking for an entire surah's text\n"
    "   Examples:\n"
    "   - \"Write Surah Al-Fatiha\"\n"
    "   - \"اكتب سورة الإخلاص\"\n"
    "   - \"Give me the entire Surah Nas\"\n"
    "\n"
    "3. **statistics**: Counting verses, surah metadata, or structural queries\n"
    "   Examples:\n"
    "   - \"How many verses in Surah Al-Baqarah?\"\n"
    "   - \"كم عدد الآيات في سورة الكهف؟\"\n"
    "   - \"Which surah has the most verses?\"\n"
    "   - \"Is Al-Baqarah Makki or Madani?\"\n"
    "   - \"كم عدد آيات سورة الفاتحة؟\"\n"
    "\n"
    "4. **interpretation**: Asking for meaning, tafsir, or explanation\n"
    "   Examples:\n"
    "   - \"What is the meaning of Ayat al-Kursi?\"\n"
    "   - \"ما معنى آخر آيات سورة البقرة؟\"\n"
    "   - \"Explain the interpretation of Al-Kawthar\"\n"
    "   - \"What does the Quran say about patience?\"\n"
    "\n"
    "Return ONLY the sub-type name (specific_verse, full_surah, statistics, or "
    "interpretation).\n"
    "\n"
    "Question: {question}";

namespace {

const std::vector<std::pair<QuranSubtype, const char*>>& subtype_exemplars() {
  static const std::vector<std::pair<QuranSubtype, const char*>> ex = {
      {QuranSubtype::specific_verse, "What does verse 2:255 say?"},
      {QuranSubtype::specific_verse, "Show me ayah 7 of Al-Fatiha"},
      {QuranSubtype::specific_verse, "اكتب الآية 275 من سورة البقرة"},
      {QuranSubtype::specific_verse, "ما هي آخر ثلاث آيات من سورة البقرة؟"},
      {QuranSubtype::specific_verse, "What are the last three verses of Surah Al-Baqarah?"},
      {QuranSubtype::full_surah, "Write Surah Al-Fatiha"},
      {QuranSubtype::full_surah, "اكتب سورة الإخلاص"},
      {QuranSubtype::full_surah, "Give me the entire Surah Nas"},
      {QuranSubtype::statistics, "How many verses in Surah Al-Baqarah?"},
      {QuranSubtype::statistics, "كم عدد الآيات في سورة الكهف؟"},
      {QuranSubtype::statistics, "Which surah has the most verses?"},
      {QuranSubtype::statistics, "Is Al-Baqarah Makki or Madani?"},
      {QuranSubtype::statistics, "كم عدد آيات سورة الفاتحة؟"},
      {QuranSubtype::interpretation, "What is the meaning of Ayat al-Kursi?"},
      {QuranSubtype::interpretation, "ما معنى آخر آيات سورة البقرة؟"},
      {QuranSubtype::interpretation, "Explain the interpretation of Al-Kawthar"},
      {QuranSubtype::interpretation, "What does the Quran say about patience?"},
  };
  return ex;
}

std::string fill_question(const std::string& tmpl, const std::string& question) {
  std::string out = tmpl;
  auto pos = out.find("{question}");
  if (pos != std::string::npos) out.replace(pos, 10, question);
  return out;
}

}  // namespace

QuranSubtype classify_subtype(const std::string& query, TextGenerator* generator,
                              Embedder* embedder, ExecutionTrace& trace) {
  if (generator) {
    try {
      std::string raw = generator->generate(fill_question(kSubtypePromptTemplate, query),
                                            /*temperature=*/0.0, /*max_tokens=*/16);
      // accept the bare label, possibly with surrounding punctuation
      std::string cleaned;
      for (char c : raw)
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
          cleaned += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (auto t = parse_subtype(cleaned)) {
        trace.add("quran.subtype", "primary: " + cleaned);
        return *t;
      }
      trace.add("quran.subtype", "nonconforming provider output; using fallback");
    } catch (const std::exception& e) {
      trace.warn(std::string("subtype provider failed: ") + e.what());
    }
  }
  auto qv = embedder->embed(query);
  double best = -2.0;
  QuranSubtype pick = QuranSubtype::interpretation;
  for (const auto& [subtype, text] : subtype_exemplars()) {
    double s = cosine(qv, embedder->embed(text));
    if (s > best) {
      best = s;
      pick = subtype;
    }
  }
  trace.add("quran.subtype", "fallback: " + to_string(pick));
  return pick;
}

// --- SQL validation -----------------------------------------------------

namespace {

// Replace the contents of SQL string literals with spaces so keyword and
// table scans cannot be fooled by quoted text.
std::string blank_literals(const std::string& sql) {
  std::string out = sql;
  bool in_str = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '\'') {
      if (in_str && i + 1 < out.size() && out[i + 1] == '\'') {
        out[i + 1] = ' ';
        ++i;
        continue;
      }
      in_str = !in_str;
    } else if (in_str) {
      out[i] = ' ';
    }
  }
  if (in_str) throw SqlRejected("unterminated string literal");
  return out;
}

std::vector<std::string> tokenize_words(const std::string& s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      cur += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    } else {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
      if (c == '(' || c == ')') words.push_back(std::string(1, c));
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

}  // namespace

SqlPlan validate_sql(const std::string& statement) {
  std::string sql = statement;
  // trim
  auto b = sql.find_first_not_of(" \t\r\n");
  auto e = sql.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw SqlRejected("empty statement");
  sql = sql.substr(b, e - b + 1);
  if (!sql.empty() && sql.back() == ';') {
    sql.pop_back();
    while (!sql.empty() && std::isspace(static_cast<unsigned char>(sql.back()))) sql.pop_back();
  }

  std::string scan = blank_literals(sql);
  if (scan.find(';') != std::string::npos)
    throw SqlRejected("multiple statements are not allowed");

  auto words = tokenize_words(scan);
  if (words.empty() || words[0] != "SELECT")
    throw SqlRejected("only SELECT statements are allowed");

  static const std::vector<std::string> kForbidden = {
      "INSERT", "UPDATE", "DELETE", "DROP",       "CREATE",  "ALTER",
      "ATTACH", "DETACH", "PRAGMA", "REPLACE",    "VACUUM",  "REINDEX",
      "INTO",   "COMMIT", "BEGIN",  "TRANSACTION", "ROLLBACK", "LOAD_EXTENSION"};
  for (const auto& w : words)
    for (const auto& f : kForbidden)
      if (w == f) throw SqlRejected("forbidden keyword: " + f);

  std::vector<std::string> tables;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (words[i] == "FROM" || words[i] == "JOIN") {
      const std::string& next = words[i + 1];
      if (next == "(") continue;  // subquery
      if (next != "QURAN")
        throw SqlRejected("references a table other than Quran: " + next);
      tables.push_back("Quran");
    }
  }
  if (tables.empty()) throw SqlRejected("statement must read from table Quran");

  return SqlPlan{sql, tables, /*read_only=*/true};
}

// --- NL to SQL ----------------------------------------------------------

namespace {

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_any(const std::string& hay, std::initializer_list<const char*> needles) {
  for (const char* n : needles)
    if (hay.find(n) != std::string::npos) return true;
  return false;
}

// Exact-name scan: every word and adjacent word pair of the question is
// normalized and checked against the canonical list. Falls back to explicit
// "surah N"/"surah <name>" forms through parse_reference-style regexes.
std::optional<int> find_surah(const std::string& question, Embedder* embedder) {
  std::string q = arabic_digits_to_ascii(question);
  static const std::regex surah_num(R"((?:[Ss]urah?|[Cc]hapter|سورة)\s+(\d{1,3}))");
  std::smatch m;
  if (std::regex_search(q, m, surah_num)) {
    int s = std::stoi(m[1]);
    if (s >= 1 && s <= 114) return s;
    return std::nullopt;
  }
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(cur);
    cur.clear();
  };
  for (char c : q) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '?' || c == ',' ||
        c == '.' || c == '!')
      flush();
    else
      cur += c;
  }
  flush();
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string one = normalize_name(words[i]);
    if (!one.empty())
      for (const auto& [cand, num] : name_index().entries)
        if (cand == one) return num;
    if (i + 1 < words.size()) {
      std::string two = normalize_name(words[i] + " " + words[i + 1]);
      if (!two.empty())
        for (const auto& [cand, num] : name_index().entries)
          if (cand == two) return num;
    }
  }
  // last resort: the word after a surah keyword, resolved fuzzily
  static const std::regex surah_name(
      R"((?:[Ss]urah?|[Cc]hapter|سورة)\s+([^\s,.;:?!]+))");
  if (std::regex_search(q, m, surah_name)) {
    try {
      return resolve_surah(m[1], embedder);
    } catch (const SurahUnresolved&) {}
  }
  return std::nullopt;
}

std::optional<SqlPlan> grammar_to_sql(const std::string& question, Embedder* embedder) {
  std::string low = lower_ascii(question);
  auto surah = find_surah(question, embedder);

  bool asks_count = contains_any(low, {"how many", "number of", "count", "كم"});
  bool about_verses = contains_any(low, {"verse", "ayah", "ayat", "آيات", "اية", "آية"});
  bool about_surahs = contains_any(low, {"surah", "sura", "chapter", "سور"});
  bool meccan = contains_any(low, {"meccan", "makki", "مكية", "مكي"});
  bool medinan = contains_any(low, {"medinan", "madani", "مدنية", "مدني"});

  static const std::regex juz_re(R"((?:juz|جزء)\s*(\d{1,2}))");
  std::smatch m;
  std::string q_ascii = arabic_digits_to_ascii(low);

  // word frequency over the diacritic-free text
  static const std::regex word_re("(?:the word|كلمة)\\s+\"?([^\"\\s?؟]+)\"?");
  if (asks_count && std::regex_search(question, m, word_re)) {
    std::string w = m[1];
    return validate_sql("SELECT COUNT(*) FROM Quran WHERE SimpleText LIKE " +
                        sql_quote("%" + w + "%"));
  }

  if (asks_count && about_verses) {
    if (std::regex_search(q_ascii, m, juz_re))
      return validate_sql("SELECT COUNT(*) FROM Quran WHERE Juz = " + m[1].str());
    if (surah)
      return validate_sql("SELECT COUNT(*) FROM Quran WHERE Surah = " +
                          std::to_string(*surah));
    if (meccan)
      return validate_sql("SELECT COUNT(*) FROM Quran WHERE Revelation = 'Meccan'");
    if (medinan)
      return validate_sql("SELECT COUNT(*) FROM Quran WHERE Revelation = 'Medinan'");
    return validate_sql("SELECT COUNT(*) FROM Quran");
  }

  if (asks_count && about_surahs && (meccan || medinan))
    return validate_sql(std::string("SELECT COUNT(DISTINCT Surah) FROM Quran WHERE "
                                    "Revelation = '") +
                        (meccan ? "Meccan" : "Medinan") + "'");

  if (contains_any(low, {"most verses", "longest", "أطول"}))
    return validate_sql(
        "SELECT Surah FROM Quran GROUP BY Surah ORDER BY COUNT(*) DESC, Surah ASC LIMIT 1");
  if (contains_any(low, {"fewest verses", "least verses", "shortest", "أقصر"}))
    return validate_sql(
        "SELECT Surah FROM Quran GROUP BY Surah ORDER BY COUNT(*) ASC, Surah ASC LIMIT 1");

  if ((meccan || medinan || contains_any(low, {"revelation", "revealed"})) && surah)
    return validate_sql("SELECT DISTINCT Revelation FROM Quran WHERE Surah = " +
                        std::to_string(*surah));

  if (surah && contains_any(low, {"write", "show", "give", "recite", "full", "entire",
                                  "اكتب", "اعرض"}))
    return validate_sql("SELECT * FROM Quran WHERE Surah = " + std::to_string(*surah) +
                        " ORDER BY Ayah");

  return std::nullopt;
}

}  // namespace

SqlPlan nl_to_sql(const std::string& question, TextGenerator* generator,
                  Embedder* embedder, ExecutionTrace& trace) {
  if (generator) {
    std::string prompt =
        "You translate natural-language questions about the Quran into SQL.\n"
        "Schema:\n"
        "CREATE TABLE Quran (ID INTEGER PRIMARY KEY, Surah INTEGER, Ayah INTEGER, "
        "AyahText TEXT, SimpleText TEXT, Translation TEXT, Juz INTEGER, Revelation TEXT);\n"
        "Return ONLY one read-only SELECT statement, nothing else.\n"
        "Question: " + question;
    try {
      std::string sql = generator->generate(prompt, /*temperature=*/0.1, /*max_tokens=*/256);
      auto plan = validate_sql(sql);
      trace.add("quran.nl2sql", "provider: " + plan.statement);
      return plan;
    } catch (const std::exception& e) {
      trace.add("quran.nl2sql", std::string("provider path rejected (") + e.what() +
                                    "); using template grammar");
    }
  }
  if (auto plan = grammar_to_sql(question, embedder)) {
    trace.add("quran.nl2sql", "grammar: " + plan->statement);
    return *plan;
  }
  throw QuranError("question is outside the supported structured-query forms");
}

bool denotational_match(const SqlPlan& pred, const SqlPlan& gold, const QuranStore& store) {
  std::vector<std::vector<std::string>> gold_rows;
  try {
    gold_rows = store.execute(gold);
  } catch (const std::exception& e) {
    throw QuranError(std::string("gold plan failed to execute: ") + e.what());
  }
  std::vector<std::vector<std::string>> pred_rows;
  try {
    pred_rows = store.execute(pred);
  } catch (const std::exception&) {
    return false;
  }
  std::sort(gold_rows.begin(), gold_rows.end());
  std::sort(pred_rows.begin(), pred_rows.end());
  return gold_rows == pred_rows;
}

}  // namespace minaret
