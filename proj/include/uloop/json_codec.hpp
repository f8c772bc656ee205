#pragma once

// JSON bindings for the domain types. Trace records, scripted-scenario
// fixtures, and the structured report rendering all share these shapes.

#include <nlohmann/json.hpp>

#include "uloop/backend.hpp"
#include "uloop/metrics.hpp"
#include "uloop/orchestrator.hpp"
#include "uloop/report.hpp"
#include "uloop/trigger.hpp"
#include "uloop/types.hpp"

namespace uloop {
void to_json(nlohmann::json& j, const Alternative& v);
void from_json(const nlohmann::json& j, Alternative& v);
void to_json(nlohmann::json& j, const TokenObservation& v);
void from_json(const nlohmann::json& j, TokenObservation& v);
}  // namespace uloop

namespace uloop::metrics {
void to_json(nlohmann::json& j, const SequenceMetrics& v);
void from_json(const nlohmann::json& j, SequenceMetrics& v);
}  // namespace uloop::metrics

namespace uloop::trigger {
void to_json(nlohmann::json& j, const TriggerDecision& v);
void from_json(const nlohmann::json& j, TriggerDecision& v);
Condition condition_from_string(const std::string& s);
CauseClass cause_from_string(const std::string& s);
}  // namespace uloop::trigger

namespace uloop::report {
void to_json(nlohmann::json& j, const ReportedAlternative& v);
void from_json(const nlohmann::json& j, ReportedAlternative& v);
void to_json(nlohmann::json& j, const UncertainTokenEntry& v);
void from_json(const nlohmann::json& j, UncertainTokenEntry& v);
void to_json(nlohmann::json& j, const GlobalStats& v);
void from_json(const nlohmann::json& j, GlobalStats& v);
void to_json(nlohmann::json& j, const SelectionRule& v);
void from_json(const nlohmann::json& j, SelectionRule& v);
void to_json(nlohmann::json& j, const UncertaintyReport& v);
void from_json(const nlohmann::json& j, UncertaintyReport& v);
}  // namespace uloop::report

namespace uloop::backend {
void to_json(nlohmann::json& j, const Message& v);
void from_json(const nlohmann::json& j, Message& v);
void to_json(nlohmann::json& j, const Usage& v);
void from_json(const nlohmann::json& j, Usage& v);
void to_json(nlohmann::json& j, const GenerationResult& v);
void from_json(const nlohmann::json& j, GenerationResult& v);
}  // namespace uloop::backend

namespace uloop::orchestrator {
void to_json(nlohmann::json& j, const PassOutcome& v);
void from_json(const nlohmann::json& j, PassOutcome& v);
void to_json(nlohmann::json& j, const LatencyBreakdown& v);
void from_json(const nlohmann::json& j, LatencyBreakdown& v);
void to_json(nlohmann::json& j, const RunRecord& v);
void from_json(const nlohmann::json& j, RunRecord& v);
}  // namespace uloop::orchestrator
