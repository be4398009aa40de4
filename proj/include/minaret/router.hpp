#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

namespace minaret {

/// The nine system intents. Closed set; enumeration order doubles as the
/// deterministic tie-break at the fallback argmax.
enum class IntentLabel {
  fiqh_ruling,
  quran_retrieval,
  general_islamic,
  greeting,
  zakat_calculation,
  inheritance_calculation,
  dua_lookup,
  islamic_calendar,
  prayer_times,
};

const std::vector<IntentLabel>& all_intents();
std::string to_string(IntentLabel intent);
std::optional<IntentLabel> parse_intent(const std::string& s);

enum class DecisionOrigin { primary, fallback };

struct RouterDecision {
  IntentLabel intent = IntentLabel::general_islamic;
  std::string language = "en";  // "ar" or "en"
  double confidence = 0.0;      // [0,1]
  std::string reasoning;
  std::vector<std::string> subquestions;
  bool requires_retrieval = false;
  DecisionOrigin origin = DecisionOrigin::primary;
};

/// One routing exemplar; embeddings are computed once at startup.
struct IntentPrototype {
  IntentLabel intent;
  std::string language;
  std::string exemplar_text;
  std::vector<float> embedding;
};

enum class ExecutionRoute { tool, calculation, retrieval, quran };
std::string to_string(ExecutionRoute route);

/// Total mapping from intent to execution route.
ExecutionRoute route_for(IntentLabel intent);

/// Margin-based confidence for the prototype fallback: (sim1-sim2)/2 + 0.5,
/// clamped to [0,1].
double margin_confidence(double sim1, double sim2);

/// The bundled bilingual exemplar seed (two per intent).
std::vector<std::pair<IntentLabel, std::pair<std::string, std::string>>>
default_prototype_seed();

/// Verbatim primary-classifier prompt with {question} substituted.
std::string classifier_prompt(const std::string& question);

class Router {
public:
  /// Prototypes are embedded eagerly; the set must cover every intent.
  Router(TextGenerator* generator, Embedder* embedder);

  /// Load extra exemplars from a data file: tab-separated
  /// "intent<TAB>language<TAB>exemplar text", one per line, '#' comments.
  void load_prototypes(const std::string& path);
  void add_prototype(IntentLabel intent, const std::string& language,
                     const std::string& exemplar);

  /// Hybrid classification. Never fails: provider errors, malformed JSON,
  /// and low confidence (< 0.5) all divert to the prototype fallback.
  RouterDecision classify(const std::string& query, ExecutionTrace& trace) const;

  /// Strict JSON contract of the primary classifier. nullopt on anything
  /// malformed (bad JSON, label outside the closed set, non-numeric
  /// confidence). Tolerates markdown code fences around the object.
  static std::optional<RouterDecision> parse_classifier_json(const std::string& raw);

  /// Prototype-similarity classification (Eq. margin confidence).
  RouterDecision fallback_classify(const std::string& query,
                                   ExecutionTrace& trace) const;

  const std::vector<IntentPrototype>& prototypes() const { return prototypes_; }

private:
  TextGenerator* generator_;
  Embedder* embedder_;
  std::vector<IntentPrototype> prototypes_;
};

}  // namespace minaret
