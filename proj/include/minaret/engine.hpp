#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "minaret/calendar.hpp"
#include "minaret/config.hpp"
#include "minaret/faraid.hpp"
#include "minaret/prayer.hpp"
#include "minaret/providers.hpp"
#include "minaret/quran.hpp"
#include "minaret/response.hpp"
#include "minaret/retrieval.hpp"
#include "minaret/router.hpp"
#include "minaret/zakat.hpp"

namespace minaret {

/// Module failure surfaced to transports with enough structure for a
/// payload: which route and stage failed, and whether the fault is the
/// caller's (validation) or the engine's.
struct EngineError : std::runtime_error {
  EngineError(std::string route_, std::string stage_, const std::string& what,
              bool validation_ = false)
      : std::runtime_error(what), route(std::move(route_)), stage(std::move(stage_)),
        validation(validation_) {}
  std::string route;
  std::string stage;
  bool validation;
};

struct AskRequest {
  std::string query;
  std::optional<std::string> language;       // "ar" / "en" hint
  std::optional<MadhhabPolicy> policy;
  std::optional<std::string> location;
  std::optional<std::string> method;         // prayer calculation method
};

struct GateScore {
  double score = 0.0;
  double threshold = 0.66;
  bool is_islamic = false;
};

/// Upstream binary Islamic/non-Islamic scorer. Pluggable; the default is a
/// keyword lexicon (plus verse-reference patterns) returning 0 or 1.
class GateScorer {
public:
  virtual ~GateScorer() = default;
  virtual double score(const std::string& query) = 0;
};

class KeywordGateScorer final : public GateScorer {
public:
  double score(const std::string& query) override;
};

constexpr double kGateThreshold = 0.66;

struct EngineOptions {
  EngineConfig config;
  TextGenerator* generator = nullptr;  // required
  Embedder* embedder = nullptr;        // required
  QuranStore* quran = nullptr;         // optional stores; routes needing a
  DocumentStore* documents = nullptr;  // missing store answer with guidance
  DuaStore* duas = nullptr;
  GateScorer* gate_scorer = nullptr;   // default: keyword lexicon
  Geocoder* geocoder = nullptr;        // default: never resolves
  MetalPrices metal_prices{7500, 110}; // cents per gram defaults
  std::function<GregorianDate()> today;  // injectable clock; default = system
};

class Engine {
public:
  explicit Engine(EngineOptions opts);

  /// Gate check at the 0.66 threshold; scorer failure fails open (treated
  /// as Islamic) with a trace note.
  GateScore gate(const std::string& query, ExecutionTrace& trace) const;

  /// Full pipeline: gate, classify, route, execute, assemble. Deterministic
  /// under the stub providers and a pinned clock.
  AssembledResponse ask(const AskRequest& req) const;

  /// Execute one intent directly, skipping gate and classifier. Backs the
  /// granular transport endpoints.
  AssembledResponse answer_intent(const AskRequest& req, IntentLabel intent) const;

  const Router& router() const { return router_; }
  const EngineConfig& config() const { return opts_.config; }
  const CityDatabase& cities() const { return cities_; }
  const EventOntology& events() const { return events_; }
  const EngineOptions& options() const { return opts_; }
  GregorianDate today() const { return opts_.today(); }

private:
  AssembledResponse dispatch(const AskRequest& req, const RouterDecision& decision,
                             ExecutionTrace trace) const;

  EngineOptions opts_;
  Router router_;
  CityDatabase cities_;
  EventOntology events_;
  KeywordGateScorer default_gate_;
  NullGeocoder null_geocoder_;
};

/// Free-text heir extraction for inheritance queries ("2 sons, a wife...").
/// Returns the estate too when an amount is present.
struct ParsedEstate {
  std::map<HeirKind, int> heirs;
  std::optional<long long> estate_cents;
};
ParsedEstate parse_heirs_text(const std::string& query);

}  // namespace minaret
