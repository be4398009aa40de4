#include "minaret/zakat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace minaret {

Cents div_round_half_even(long long numerator, long long denominator) {
  bool negative = (numerator < 0) != (denominator < 0);
  unsigned long long n = static_cast<unsigned long long>(std::llabs(numerator));
  unsigned long long d = static_cast<unsigned long long>(std::llabs(denominator));
  unsigned long long q = n / d, r = n % d;
  unsigned long long twice = 2 * r;
  if (twice > d || (twice == d && (q & 1)))
    ++q;
  long long result = static_cast<long long>(q);
  return negative ? -result : result;
}

std::string format_cents(Cents amount) {
  bool neg = amount < 0;
  long long a = std::llabs(amount);
  std::ostringstream os;
  if (neg) os << '-';
  os << a / 100 << '.' << (a % 100 < 10 ? "0" : "") << a % 100;
  return os.str();
}

std::optional<LivestockSpecies> parse_species(const std::string& s) {
  if (s == "camel" || s == "camels") return LivestockSpecies::camel;
  if (s == "cattle" || s == "cow" || s == "cows") return LivestockSpecies::cattle;
  if (s == "sheep" || s == "goat" || s == "goats") return LivestockSpecies::sheep;
  return std::nullopt;
}

std::string to_string(LivestockSpecies s) {
  switch (s) {
    case LivestockSpecies::camel: return "camel";
    case LivestockSpecies::cattle: return "cattle";
    case LivestockSpecies::sheep: return "sheep";
  }
  return "sheep";
}

Cents nisab(const MetalPrices& prices) {
  if (prices.gold_per_gram <= 0 || prices.silver_per_gram <= 0)
    throw ZakatError("metal prices must be strictly positive");
  return std::min(85 * prices.gold_per_gram, 595 * prices.silver_per_gram);
}

std::vector<ProduceDue> agriculture_zakat(const std::vector<ProduceHolding>& holdings) {
  constexpr double kThresholdKg = 653.0;  // 5 wasq
  std::vector<ProduceDue> out;
  for (const auto& h : holdings) {
    if (h.kilograms < 0) throw ZakatError("produce mass must be non-negative");
    ProduceDue d;
    d.holding = h;
    if (h.kilograms >= kThresholdKg) {
      d.rate_percent = (h.irrigation == Irrigation::natural) ? 10 : 5;
      d.due_kilograms = h.kilograms * d.rate_percent / 100.0;
    }
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

std::string plural(long long n, const std::string& noun) {
  std::ostringstream os;
  os << n << ' ' << noun;
  if (n != 1) os << 's';
  return os.str();
}

std::string sheep_due(long long n) {
  if (n < 40) return "";
  if (n <= 120) return "1 sheep";
  if (n <= 200) return "2 sheep";
  if (n <= 399) return "3 sheep";
  return std::to_string(n / 100) + " sheep";  // one per full hundred from 400 up
}

std::string camel_due(long long n) {
  if (n < 5) return "";
  if (n <= 9) return "1 sheep";
  if (n <= 14) return "2 sheep";
  if (n <= 19) return "3 sheep";
  if (n <= 24) return "4 sheep";
  if (n <= 35) return "1 bint makhad (1-year-old she-camel)";
  if (n <= 45) return "1 bint labun (2-year-old she-camel)";
  if (n <= 60) return "1 hiqqah (3-year-old she-camel)";
  if (n <= 75) return "1 jadha'ah (4-year-old she-camel)";
  if (n <= 90) return "2 bint labun";
  if (n <= 120) return "2 hiqqah";
  // Above 120: a hiqqah per 50 and a bint labun per 40, combined to cover
  // the count with the least remainder (more hiqqah on ties).
  long long best_a = 0, best_b = 0, best_rem = n;
  for (long long a = n / 50; a >= 0; --a) {
    long long b = (n - 50 * a) / 40;
    long long rem = n - 50 * a - 40 * b;
    if (rem < best_rem) { best_rem = rem; best_a = a; best_b = b; }
  }
  std::ostringstream os;
  if (best_a > 0) os << best_a << " hiqqah";
  if (best_b > 0) os << (best_a > 0 ? " and " : "") << best_b << " bint labun";
  return os.str();
}

std::string cattle_due(long long n) {
  if (n < 30) return "";
  if (n <= 39) return "1 tabi' (1-year-old calf)";
  if (n <= 59) return "1 musinnah (2-year-old cow)";
  if (n <= 69) return "2 tabi'";
  // 70 and up: a tabi' per 30 and a musinnah per 40, least remainder
  // (more musinnah on ties).
  long long best_a = 0, best_b = 0, best_rem = n;
  for (long long b = n / 40; b >= 0; --b) {
    long long a = (n - 40 * b) / 30;
    long long rem = n - 40 * b - 30 * a;
    if (rem < best_rem) { best_rem = rem; best_a = a; best_b = b; }
  }
  std::ostringstream os;
  if (best_b > 0) os << best_b << " musinnah";
  if (best_a > 0) os << (best_b > 0 ? " and " : "") << best_a << " tabi'";
  return os.str();
}

}  // namespace

std::string livestock_due_for(LivestockSpecies species, long long head_count) {
  if (head_count < 0) throw ZakatError("head count must be non-negative");
  switch (species) {
    case LivestockSpecies::sheep: return sheep_due(head_count);
    case LivestockSpecies::camel: return camel_due(head_count);
    case LivestockSpecies::cattle: return cattle_due(head_count);
  }
  return "";
}

std::vector<LivestockDue> livestock_zakat(const std::vector<LivestockHolding>& holdings) {
  std::vector<LivestockDue> out;
  for (const auto& h : holdings)
    out.push_back({h, livestock_due_for(h.species, h.head_count)});
  return out;
}

ZakatBreakdown compute_zakat(const ZakatAssets& assets, Cents liabilities,
                             const MetalPrices& prices) {
  if (liabilities < 0) throw ZakatError("liabilities must be non-negative");
  if (assets.cash < 0 || assets.business < 0 || assets.stocks < 0 ||
      assets.gold_milligrams < 0 || assets.silver_milligrams < 0)
    throw ZakatError("asset quantities must be non-negative");

  ZakatBreakdown b;
  b.nisab_gold = 85 * prices.gold_per_gram;
  b.nisab_silver = 595 * prices.silver_per_gram;
  b.nisab = nisab(prices);

  Cents gold_value = div_round_half_even(assets.gold_milligrams * prices.gold_per_gram, 1000);
  Cents silver_value = div_round_half_even(assets.silver_milligrams * prices.silver_per_gram, 1000);
  b.monetary_assets = assets.cash + gold_value + silver_value + assets.business + assets.stocks;
  b.net_monetary = b.monetary_assets - liabilities;

  if (b.net_monetary >= b.nisab) {
    b.monetary_due = div_round_half_even(b.net_monetary * 25, 1000);  // 2.5%
  } else {
    b.monetary_due = 0;
    if (b.monetary_assets > 0)
      b.warnings.push_back("net monetary assets are below the nisab threshold; no monetary zakat is due");
  }

  b.agriculture_due = agriculture_zakat(assets.produce);
  b.livestock_due = livestock_zakat(assets.livestock);
  b.warnings.push_back("assumes the hawl (one lunar year of possession) has elapsed for all assets");
  return b;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

Cents to_cents(double amount) { return static_cast<Cents>(std::llround(amount * 100.0)); }

double parse_number(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ','), s.end());
  return std::stod(s);
}

std::optional<ExtractedZakat> provider_extract(const std::string& query,
                                               TextGenerator* generator,
                                               ExecutionTrace& trace) {
  if (!generator) return std::nullopt;
  std::string raw;
  try {
    raw = generator->generate(
        "Extract zakat parameters from the question as strict JSON with keys: "
        "cash, gold_grams, silver_grams, business, stocks, liabilities, currency. "
        "Use 0 for absent values. Reply with JSON only.\nQuestion: " + query,
        0.0, 256);
  } catch (const std::exception& e) {
    trace.warn(std::string("zakat extraction provider failed: ") + e.what());
    return std::nullopt;
  }
  auto start = raw.find('{');
  auto end = raw.rfind('}');
  if (start == std::string::npos || end == std::string::npos || end <= start)
    return std::nullopt;
  json doc;
  try {
    doc = json::parse(raw.substr(start, end - start + 1));
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!doc.is_object()) return std::nullopt;
  auto num = [&doc](const char* key) -> double {
    return doc.contains(key) && doc[key].is_number() ? doc[key].get<double>() : 0.0;
  };
  ExtractedZakat e;
  e.assets.cash = to_cents(num("cash"));
  e.assets.gold_milligrams = static_cast<long long>(std::llround(num("gold_grams") * 1000));
  e.assets.silver_milligrams = static_cast<long long>(std::llround(num("silver_grams") * 1000));
  e.assets.business = to_cents(num("business"));
  e.assets.stocks = to_cents(num("stocks"));
  e.liabilities = to_cents(num("liabilities"));
  if (doc.contains("currency") && doc["currency"].is_string())
    e.currency = doc["currency"].get<std::string>();
  bool any = e.assets.cash || e.assets.gold_milligrams || e.assets.silver_milligrams ||
             e.assets.business || e.assets.stocks;
  if (!any) return std::nullopt;
  trace.add("zakat.extract", "provider extraction succeeded");
  return e;
}

}  // namespace

ExtractionResult extract_parameters(const std::string& query, TextGenerator* generator,
                                    ExecutionTrace& trace) {
  if (auto e = provider_extract(query, generator, trace)) return *e;

  // Deterministic regex fallback for simple phrasings.
  ExtractedZakat e;
  bool any = false;

  static const std::regex metal_re(
      R"(([\d,]+(?:\.\d+)?)\s*(?:grams?|g)\s+(?:of\s+)?(gold|silver))",
      std::regex::icase);
  for (auto it = std::sregex_iterator(query.begin(), query.end(), metal_re);
       it != std::sregex_iterator(); ++it) {
    double grams = parse_number((*it)[1].str());
    std::string metal = (*it)[2].str();
    for (char& c : metal) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (metal == "gold") e.assets.gold_milligrams += static_cast<long long>(std::llround(grams * 1000));
    else e.assets.silver_milligrams += static_cast<long long>(std::llround(grams * 1000));
    any = true;
  }

  static const std::regex cash_re(
      R"((?:\$\s*([\d,]+(?:\.\d+)?))|(?:([\d,]+(?:\.\d+)?)\s*(usd|dollars?|sar|qar|aed|riyals?|euros?|eur)\b))",
      std::regex::icase);
  for (auto it = std::sregex_iterator(query.begin(), query.end(), cash_re);
       it != std::sregex_iterator(); ++it) {
    std::string amount = (*it)[1].matched ? (*it)[1].str() : (*it)[2].str();
    e.assets.cash += to_cents(parse_number(amount));
    if ((*it)[3].matched) {
      std::string cur = (*it)[3].str();
      for (char& c : cur) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (cur == "DOLLAR" || cur == "DOLLARS") cur = "USD";
      if (cur == "RIYAL" || cur == "RIYALS") cur = "SAR";
      e.currency = cur;
    }
    any = true;
  }

  static const std::regex herd_re(R"((\d+)\s*(sheep|goats?|camels?|cows?|cattle)\b)",
                                  std::regex::icase);
  for (auto it = std::sregex_iterator(query.begin(), query.end(), herd_re);
       it != std::sregex_iterator(); ++it) {
    std::string species_s = (*it)[2].str();
    for (char& c : species_s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto sp = parse_species(species_s)) {
      e.assets.livestock.push_back({*sp, std::stoll((*it)[1].str())});
      any = true;
    }
  }

  // "owe" only counts as a debt when the amount follows it directly;
  // "how much zakat do I owe on $X" names the assets, not a liability.
  static const std::regex debt_re(
      R"((?:debts?|liabilit(?:y|ies))\D{0,12}([\d,]+(?:\.\d+)?)|owe\s+\$?\s*([\d,]+(?:\.\d+)?))",
      std::regex::icase);
  std::smatch dm;
  if (std::regex_search(query, dm, debt_re)) {
    e.liabilities = to_cents(parse_number(dm[1].matched ? dm[1].str() : dm[2].str()));
  }

  if (!any) {
    trace.add("zakat.extract", "no parameters found; requesting clarification");
    return ClarificationRequest{
        "To compute zakat I need your asset amounts. Please state cash, gold or "
        "silver weights in grams, business assets, and any debts.",
        {"cash", "gold_grams", "silver_grams", "business", "liabilities"}};
  }
  trace.add("zakat.extract", "regex fallback extraction");
  return e;
}

}  // namespace minaret
