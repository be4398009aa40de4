#include "minaret/json_io.hpp"

namespace minaret {

nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  auto start = trace.entries().empty() ? std::chrono::steady_clock::time_point{}
                                       : trace.entries().front().at;
  for (const auto& e : trace.entries()) {
    nlohmann::json item;
    item["stage"] = e.stage;
    item["detail"] = e.detail;
    item["ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(e.at - start).count();
    arr.push_back(item);
  }
  return arr;
}

nlohmann::json response_to_json(const AssembledResponse& r) {
  nlohmann::json j;
  j["answer"] = r.answer;
  j["route"] = r.route;
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& c : r.references) {
    nlohmann::json ref;
    ref["tag"] = c.tag;
    ref["source_title"] = c.source_title;
    if (c.source_url) ref["source_url"] = *c.source_url;
    if (c.span) ref["span"] = *c.span;
    refs.push_back(ref);
  }
  j["references"] = refs;
  j["metadata"] = r.tool_metadata;
  j["trace"] = trace_to_json(r.trace);
  return j;
}

nlohmann::json decision_to_json(const RouterDecision& d) {
  nlohmann::json j;
  j["intent"] = to_string(d.intent);
  j["language"] = d.language;
  j["confidence"] = d.confidence;
  j["reasoning"] = d.reasoning;
  j["subquestions"] = d.subquestions;
  j["requires_retrieval"] = d.requires_retrieval;
  j["origin"] = d.origin == DecisionOrigin::primary ? "primary" : "fallback";
  j["route"] = to_string(route_for(d.intent));
  return j;
}

nlohmann::json outcome_to_json(const DistributionOutcome& o) {
  nlohmann::json j;
  j["policy"] = to_string(o.policy);
  nlohmann::json shares = nlohmann::json::object();
  for (const auto& [name, s] : o.shares) {
    nlohmann::json sh;
    sh["fraction"] = s.fraction.str();
    sh["count"] = s.count;
    sh["amount_cents"] = s.amount_cents;
    shares[name] = sh;
  }
  j["shares"] = shares;
  nlohmann::json flags = nlohmann::json::array();
  for (auto f : o.applied) flags.push_back(to_string(f));
  j["applied_rules"] = flags;
  j["explanation"] = o.explanation;
  return j;
}

nlohmann::json breakdown_to_json(const ZakatBreakdown& b) {
  nlohmann::json j;
  j["nisab_cents"] = b.nisab;
  j["nisab_gold_cents"] = b.nisab_gold;
  j["nisab_silver_cents"] = b.nisab_silver;
  j["monetary_assets_cents"] = b.monetary_assets;
  j["net_monetary_cents"] = b.net_monetary;
  j["monetary_due_cents"] = b.monetary_due;
  nlohmann::json ag = nlohmann::json::array();
  for (const auto& p : b.agriculture_due) {
    nlohmann::json item;
    item["kind"] = p.holding.kind;
    item["kilograms"] = p.holding.kilograms;
    item["irrigation"] = p.holding.irrigation == Irrigation::natural ? "natural" : "artificial";
    item["due_kilograms"] = p.due_kilograms;
    item["rate_percent"] = p.rate_percent;
    ag.push_back(item);
  }
  j["agriculture_due"] = ag;
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : b.livestock_due) {
    nlohmann::json item;
    item["species"] = to_string(l.holding.species);
    item["head_count"] = l.holding.head_count;
    item["due"] = l.due;
    lv.push_back(item);
  }
  j["livestock_due"] = lv;
  j["warnings"] = b.warnings;
  return j;
}

}  // namespace minaret
