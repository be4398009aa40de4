#pragma once

#include <json.hpp>

#include "minaret/engine.hpp"
#include "minaret/faraid.hpp"
#include "minaret/response.hpp"
#include "minaret/router.hpp"
#include "minaret/zakat.hpp"

namespace minaret {

nlohmann::json trace_to_json(const ExecutionTrace& trace);
nlohmann::json response_to_json(const AssembledResponse& r);
nlohmann::json decision_to_json(const RouterDecision& d);
nlohmann::json outcome_to_json(const DistributionOutcome& o);
nlohmann::json breakdown_to_json(const ZakatBreakdown& b);

}  // namespace minaret
