#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

struct sqlite3;

namespace minaret {

struct QuranError : std::runtime_error {
  explicit QuranError(const std::string& what) : std::runtime_error(what) {}
};

/// Unresolved surah name; carries the closest canonical candidates.
struct SurahUnresolved : QuranError {
  SurahUnresolved(const std::string& what, std::vector<std::string> sugg)
      : QuranError(what), suggestions(std::move(sugg)) {}
  std::vector<std::string> suggestions;
};

struct SqlRejected : QuranError {
  explicit SqlRejected(const std::string& rule) : QuranError(rule) {}
};

enum class QuranSubtype { specific_verse, full_surah, statistics, interpretation };
std::string to_string(QuranSubtype s);
std::optional<QuranSubtype> parse_subtype(const std::string& s);

struct VerseRef {
  int surah = 0;
  int ayah_start = 0;
  int ayah_end = 0;
};

/// Parse result: a surah plus an optional ayah range. A missing range means
/// the query named only a surah (degrades to full-surah handling).
struct ParsedReference {
  int surah = 0;
  std::optional<std::pair<int, int>> ayah_range;
};

struct VerseRecord {
  long long id = 0;
  int surah = 0;
  int ayah = 0;
  std::string ayah_text;    // Uthmanic, with diacritics
  std::string simple_text;  // diacritics stripped
  std::string translation;  // English
  int juz = 0;
  std::string revelation;   // "Meccan" / "Medinan"
};

struct SqlPlan {
  std::string statement;
  std::vector<std::string> tables;
  bool read_only = false;
};

struct SurahInfo {
  std::string transliteration;  // canonical name, e.g. "Al-Baqarah"
  std::string arabic_name;
  std::string english_title;
  int verse_count = 0;
  std::string revelation;
};

/// Static canonical metadata for the 114 surahs (Hafs reading).
const std::vector<SurahInfo>& surah_catalog();

/// Strip Arabic diacritics and Quranic annotation marks.
std::string strip_diacritics(const std::string& uthmani);

/// Exact match (case-insensitive, "Surah "/Arabic prefix stripped) against
/// canonical names, else fuzzy with score = max(edit similarity, embedding
/// cosine), accepted at >= 0.6. Throws SurahUnresolved with top-3 suggestions.
int resolve_surah(const std::string& name, Embedder* embedder = nullptr);

/// Reference formats: "2:275", "2:1-5", "Al-Baqarah:275", "Surah 2 Verse
/// 275", and Arabic equivalents. A bare surah mention gives a partial result.
/// Unparseable input throws QuranError listing the accepted formats.
ParsedReference parse_reference(const std::string& query, Embedder* embedder = nullptr);

/// Read-side access to the ingested verse store.
class QuranStore {
public:
  explicit QuranStore(const std::string& db_path, bool read_only = true);
  ~QuranStore();
  QuranStore(const QuranStore&) = delete;
  QuranStore& operator=(const QuranStore&) = delete;

  int verse_count(int surah) const;
  long long total_verses() const;

  /// Verbatim records in ayah order plus the canonical citation URL
  /// (https://quran.com/<surah>/<ayah>, ranges keyed by the start ayah).
  std::pair<std::vector<VerseRecord>, std::string> fetch_verses(const VerseRef& ref) const;

  std::vector<VerseRecord> full_surah(int surah) const;

  /// Execute a validated plan; rows come back as text-rendered tuples.
  std::vector<std::vector<std::string>> execute(const SqlPlan& plan) const;

  sqlite3* handle() const { return db_; }

private:
  sqlite3* db_ = nullptr;
};

/// Offline ingestion: builds the store from the bundled corpus JSON and
/// asserts 114 surahs, 6236 verses, and (surah, ayah) uniqueness.
void ingest_quran(const std::string& corpus_json_path, const std::string& db_path);

/// Subtype classification: provider constrained to the closed label set,
/// with an embedding fallback over built-in exemplars on invalid output.
QuranSubtype classify_subtype(const std::string& query, TextGenerator* generator,
                              Embedder* embedder, ExecutionTrace& trace);

extern const char* kSubtypePromptTemplate;

/// Provider-backed NL-to-SQL when a generator is given, else a deterministic
/// template grammar. Output always passes through validate_sql.
SqlPlan nl_to_sql(const std::string& question, TextGenerator* generator,
                  Embedder* embedder, ExecutionTrace& trace);

/// Accepts a single read-only SELECT over table Quran; throws SqlRejected
/// naming the violated rule otherwise.
SqlPlan validate_sql(const std::string& statement);

/// Denotational equivalence: execute both on the store, compare scalars
/// exactly and row sets as tuple multisets. A failing predicted plan is
/// incorrect; a failing gold plan is an evaluation error.
bool denotational_match(const SqlPlan& pred, const SqlPlan& gold, const QuranStore& store);

}  // namespace minaret
