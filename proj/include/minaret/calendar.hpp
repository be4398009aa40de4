#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

namespace minaret {

struct CalendarError : std::runtime_error {
  explicit CalendarError(const std::string& what) : std::runtime_error(what) {}
};

struct GregorianDate {
  int year = 0;
  int month = 1;  // 1..12
  int day = 1;
  auto operator<=>(const GregorianDate&) const = default;
};

struct HijriDate {
  int year = 0;   // AH
  int month = 1;  // 1..12
  int day = 1;    // 1..30
  auto operator<=>(const HijriDate&) const = default;
};

long gregorian_to_jdn(const GregorianDate& d);
GregorianDate jdn_to_gregorian(long jdn);

/// Tabular Umm al-Qura calendar, AH 1343-1500. Dates outside the table
/// raise CalendarError naming the supported bounds.
namespace umm_al_qura {
constexpr int kFirstYear = 1343;
constexpr int kLastYear = 1500;
int month_length(int year, int month);
GregorianDate first_gregorian_day();
GregorianDate last_gregorian_day();
}  // namespace umm_al_qura

extern const char* const kMoonSightingDisclaimerEn;
extern const char* const kMoonSightingDisclaimerAr;

struct HijriConversion {
  HijriDate date;
  bool disclaimer = true;  // always set: tabular dates may differ from local sighting
};

HijriConversion gregorian_to_hijri(const GregorianDate& d);
GregorianDate hijri_to_gregorian(const HijriDate& h);

const std::vector<std::string>& hijri_month_names_en();

enum class CalendarQueryKind {
  current_hijri,
  greg_to_hijri,
  hijri_to_greg,
  event_date,
  upcoming_events,
};
std::string to_string(CalendarQueryKind kind);

struct IslamicEvent {
  std::string key;
  std::string name_ar;
  std::string name_en;
  int hijri_month = 1;
  int hijri_day = 1;
  int duration_days = 1;
};

/// Bundled bilingual ontology (20+ events). A data file with the same
/// tab-separated layout can replace it.
class EventOntology {
public:
  EventOntology();  // embedded seed
  static EventOntology from_file(const std::string& path);

  const std::vector<IslamicEvent>& events() const { return events_; }
  std::optional<IslamicEvent> find(const std::string& key) const;
  std::vector<std::string> known_keys() const;

  /// Next occurrence on or after `today` (year-rollover applied).
  GregorianDate next_occurrence(const std::string& key, const GregorianDate& today) const;

  /// The next `limit` events by date, on or after `today`.
  std::vector<std::pair<IslamicEvent, GregorianDate>> upcoming(
      const GregorianDate& today, int limit = 5) const;

private:
  void parse(const std::string& text);
  std::vector<IslamicEvent> events_;
};

/// "ar" iff Arabic-block codepoints (U+0600-U+06FF) exceed 30% of the
/// non-whitespace characters.
std::string detect_language_ratio(const std::string& text, ExecutionTrace* trace = nullptr);

CalendarQueryKind detect_calendar_kind(const std::string& query, ExecutionTrace* trace = nullptr);

/// One-or-two-sentence greeting in the detected language; provider failures
/// fall back to a fixed bilingual reply.
std::string greet(const std::string& query, TextGenerator& generator,
                  double temperature, int max_tokens, ExecutionTrace& trace);

/// Truncate text at a sentence boundary after at most `max_sentences`.
std::string truncate_sentences(const std::string& text, int max_sentences);

}  // namespace minaret
