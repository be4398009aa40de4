#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

namespace minaret {

struct ZakatError : std::runtime_error {
  explicit ZakatError(const std::string& what) : std::runtime_error(what) {}
};

/// Money in exact minor units (cents). All zakat arithmetic is integer;
/// rounding is half-even and happens once per derived amount.
using Cents = long long;

/// round(numerator / denominator) half-even, exact integer arithmetic.
Cents div_round_half_even(long long numerator, long long denominator);

std::string format_cents(Cents amount);

enum class Irrigation { natural, artificial };

struct ProduceHolding {
  std::string kind;
  double kilograms = 0.0;
  Irrigation irrigation = Irrigation::natural;
};

enum class LivestockSpecies { camel, cattle, sheep };
std::optional<LivestockSpecies> parse_species(const std::string& s);
std::string to_string(LivestockSpecies s);

struct LivestockHolding {
  LivestockSpecies species = LivestockSpecies::sheep;
  long long head_count = 0;
};

struct ZakatAssets {
  Cents cash = 0;
  long long gold_milligrams = 0;
  long long silver_milligrams = 0;
  Cents business = 0;
  Cents stocks = 0;
  std::vector<ProduceHolding> produce;
  std::vector<LivestockHolding> livestock;
};

struct MetalPrices {
  Cents gold_per_gram = 0;    // strictly positive
  Cents silver_per_gram = 0;  // strictly positive
};

struct ProduceDue {
  ProduceHolding holding;
  double due_kilograms = 0.0;
  int rate_percent = 0;  // 0 below threshold
};

struct LivestockDue {
  LivestockHolding holding;
  std::string due;  // in-kind description, empty when nothing due
};

struct ZakatBreakdown {
  Cents nisab = 0;
  Cents nisab_gold = 0;
  Cents nisab_silver = 0;
  Cents monetary_assets = 0;
  Cents net_monetary = 0;
  Cents monetary_due = 0;
  std::vector<ProduceDue> agriculture_due;
  std::vector<LivestockDue> livestock_due;
  std::vector<std::string> warnings;
};

/// Nisab threshold: min(85 g x gold price, 595 g x silver price).
Cents nisab(const MetalPrices& prices);

/// Agriculture dues: below 653 kg nothing; natural irrigation 10%,
/// artificial 5% of the mass.
std::vector<ProduceDue> agriculture_zakat(const std::vector<ProduceHolding>& holdings);

/// Classical in-kind schedules for camels, cattle, and sheep.
std::vector<LivestockDue> livestock_zakat(const std::vector<LivestockHolding>& holdings);
std::string livestock_due_for(LivestockSpecies species, long long head_count);

/// Full deterministic computation: monetary 2.5% above nisab, plus
/// agriculture and livestock schedules, with assumption warnings.
ZakatBreakdown compute_zakat(const ZakatAssets& assets, Cents liabilities,
                             const MetalPrices& prices);

// ---------------------------------------------------------------------------
// Free-text parameter extraction
// ---------------------------------------------------------------------------

struct ExtractedZakat {
  ZakatAssets assets;
  Cents liabilities = 0;
  std::optional<MetalPrices> prices;  // unset: use configured defaults
  std::string currency = "USD";
};

struct ClarificationRequest {
  std::string message;
  std::vector<std::string> needed_fields;
};

using ExtractionResult = std::variant<ExtractedZakat, ClarificationRequest>;

/// Provider-backed extraction with a deterministic regex fallback for simple
/// "amount + currency" and "N grams of gold/silver" phrasings.
ExtractionResult extract_parameters(const std::string& query, TextGenerator* generator,
                                    ExecutionTrace& trace);

}  // namespace minaret
