#include "uloop/json_codec.hpp"

#include <stdexcept>

namespace uloop {

using nlohmann::json;

void to_json(json& j, const Alternative& v) {
  j = json{{"text", v.text}, {"logprob", v.logprob}};
}

void from_json(const json& j, Alternative& v) {
  j.at("text").get_to(v.text);
  j.at("logprob").get_to(v.logprob);
}

void to_json(json& j, const TokenObservation& v) {
  j = json{{"position", v.position},
           {"text", v.text},
           {"logprob", v.logprob},
           {"alternatives", v.alternatives}};
}

void from_json(const json& j, TokenObservation& v) {
  j.at("position").get_to(v.position);
  j.at("text").get_to(v.text);
  j.at("logprob").get_to(v.logprob);
  j.at("alternatives").get_to(v.alternatives);
}

}  // namespace uloop

namespace uloop::metrics {

using nlohmann::json;

void to_json(json& j, const SequenceMetrics& v) {
  j = json{{"perplexity", v.perplexity},
           {"entropies", v.entropies},
           {"max_entropy", v.max_entropy},
           {"mean_entropy", v.mean_entropy},
           {"low_conf_count", v.low_conf_count},
           {"very_low_conf_count", v.very_low_conf_count},
           {"uncertain_fraction", v.uncertain_fraction}};
}

void from_json(const json& j, SequenceMetrics& v) {
  j.at("perplexity").get_to(v.perplexity);
  j.at("entropies").get_to(v.entropies);
  j.at("max_entropy").get_to(v.max_entropy);
  j.at("mean_entropy").get_to(v.mean_entropy);
  j.at("low_conf_count").get_to(v.low_conf_count);
  j.at("very_low_conf_count").get_to(v.very_low_conf_count);
  j.at("uncertain_fraction").get_to(v.uncertain_fraction);
}

}  // namespace uloop::metrics

namespace uloop::trigger {

using nlohmann::json;

Condition condition_from_string(const std::string& s) {
  if (s == "perplexity") return Condition::Perplexity;
  if (s == "entropy") return Condition::Entropy;
  if (s == "count") return Condition::Count;
  throw std::invalid_argument("unknown trigger condition: " + s);
}

CauseClass cause_from_string(const std::string& s) {
  if (s == "global_confusion") return CauseClass::GlobalConfusion;
  if (s == "critical_decision") return CauseClass::CriticalDecision;
  if (s == "distributed") return CauseClass::Distributed;
  if (s == "multi_signal") return CauseClass::MultiSignal;
  if (s == "none") return CauseClass::None;
  throw std::invalid_argument("unknown cause class: " + s);
}

void to_json(json& j, const TriggerDecision& v) {
  json fired = json::array();
  for (auto c : v.fired) fired.push_back(to_string(c));
  j = json{{"refine", v.refine}, {"fired", fired}, {"cause", to_string(v.cause)}};
}

void from_json(const json& j, TriggerDecision& v) {
  v.refine = j.at("refine").get<bool>();
  v.fired.clear();
  for (const auto& c : j.at("fired")) v.fired.push_back(condition_from_string(c.get<std::string>()));
  v.cause = cause_from_string(j.at("cause").get<std::string>());
}

}  // namespace uloop::trigger

namespace uloop::report {

using nlohmann::json;

void to_json(json& j, const ReportedAlternative& v) {
  j = json{{"text", v.text}, {"probability", v.probability}, {"share", v.share}};
}

void from_json(const json& j, ReportedAlternative& v) {
  j.at("text").get_to(v.text);
  j.at("probability").get_to(v.probability);
  j.at("share").get_to(v.share);
}

void to_json(json& j, const UncertainTokenEntry& v) {
  j = json{{"position", v.position},
           {"text", v.text},
           {"confidence", v.confidence},
           {"alternatives", v.alternatives},
           {"entropy", v.entropy},
           {"context_before", v.context_before},
           {"context_after", v.context_after}};
}

void from_json(const json& j, UncertainTokenEntry& v) {
  j.at("position").get_to(v.position);
  j.at("text").get_to(v.text);
  j.at("confidence").get_to(v.confidence);
  j.at("alternatives").get_to(v.alternatives);
  j.at("entropy").get_to(v.entropy);
  j.at("context_before").get_to(v.context_before);
  j.at("context_after").get_to(v.context_after);
}

void to_json(json& j, const GlobalStats& v) {
  j = json{{"perplexity", v.perplexity},
           {"mean_entropy", v.mean_entropy},
           {"low_conf_count", v.low_conf_count},
           {"very_low_conf_count", v.very_low_conf_count},
           {"uncertain_fraction", v.uncertain_fraction}};
}

void from_json(const json& j, GlobalStats& v) {
  j.at("perplexity").get_to(v.perplexity);
  j.at("mean_entropy").get_to(v.mean_entropy);
  j.at("low_conf_count").get_to(v.low_conf_count);
  j.at("very_low_conf_count").get_to(v.very_low_conf_count);
  j.at("uncertain_fraction").get_to(v.uncertain_fraction);
}

void to_json(json& j, const SelectionRule& v) {
  j = json{{"entropy_threshold", v.entropy_threshold},
           {"low_conf_probability", v.low_conf_probability},
           {"max_entries", v.max_entries ? json(*v.max_entries) : json(nullptr)}};
}

void from_json(const json& j, SelectionRule& v) {
  j.at("entropy_threshold").get_to(v.entropy_threshold);
  j.at("low_conf_probability").get_to(v.low_conf_probability);
  const auto& cap = j.at("max_entries");
  v.max_entries = cap.is_null() ? std::nullopt : std::optional<std::size_t>(cap.get<std::size_t>());
}

void to_json(json& j, const UncertaintyReport& v) {
  j = json{{"global", v.global}, {"entries", v.entries}, {"selection", v.selection}};
}

void from_json(const json& j, UncertaintyReport& v) {
  j.at("global").get_to(v.global);
  j.at("entries").get_to(v.entries);
  j.at("selection").get_to(v.selection);
}

}  // namespace uloop::report

namespace uloop::backend {

using nlohmann::json;

void to_json(json& j, const Message& v) {
  j = json{{"role", v.role}, {"content", v.content}};
}

void from_json(const json& j, Message& v) {
  j.at("role").get_to(v.role);
  j.at("content").get_to(v.content);
}

void to_json(json& j, const Usage& v) {
  j = json{{"prompt_tokens", v.prompt_tokens}, {"completion_tokens", v.completion_tokens}};
}

void from_json(const json& j, Usage& v) {
  j.at("prompt_tokens").get_to(v.prompt_tokens);
  j.at("completion_tokens").get_to(v.completion_tokens);
}

void to_json(json& j, const GenerationResult& v) {
  j = json{{"text", v.text},
           {"tokens", v.tokens},
           {"usage", v.usage},
           {"wall_time_ms", v.wall_time_ms},
           {"attempts", v.attempts}};
}

void from_json(const json& j, GenerationResult& v) {
  j.at("text").get_to(v.text);
  j.at("tokens").get_to(v.tokens);
  j.at("usage").get_to(v.usage);
  v.wall_time_ms = j.value("wall_time_ms", 0.0);
  v.attempts = j.value("attempts", 1);
}

}  // namespace uloop::backend

namespace uloop::orchestrator {

using nlohmann::json;

void to_json(json& j, const PassOutcome& v) {
  j = json{{"result", v.result}, {"metrics", v.metrics}};
}

void from_json(const json& j, PassOutcome& v) {
  j.at("result").get_to(v.result);
  j.at("metrics").get_to(v.metrics);
}

void to_json(json& j, const LatencyBreakdown& v) {
  j = json{{"generation_ms", v.generation_ms},
           {"logprob_extraction_ms", v.logprob_extraction_ms},
           {"metric_ms", v.metric_ms},
           {"trigger_ms", v.trigger_ms},
           {"report_ms", v.report_ms},
           {"refinement_ms", v.refinement_ms},
           {"total_ms", v.total_ms}};
}

void from_json(const json& j, LatencyBreakdown& v) {
  j.at("generation_ms").get_to(v.generation_ms);
  j.at("logprob_extraction_ms").get_to(v.logprob_extraction_ms);
  j.at("metric_ms").get_to(v.metric_ms);
  j.at("trigger_ms").get_to(v.trigger_ms);
  j.at("report_ms").get_to(v.report_ms);
  j.at("refinement_ms").get_to(v.refinement_ms);
  j.at("total_ms").get_to(v.total_ms);
}

void to_json(json& j, const RunRecord& v) {
  j = json{{"query", v.query},
           {"timestamp_ms", v.timestamp_ms},
           {"first_pass", v.first_pass},
           {"decision", v.decision},
           {"report", v.report ? json(*v.report) : json(nullptr)},
           {"second_pass", v.second_pass ? json(*v.second_pass) : json(nullptr)},
           {"final_text", v.final_text},
           {"degraded", v.degraded},
           {"error", v.error ? json(*v.error) : json(nullptr)},
           {"latency", v.latency},
           {"cost", v.cost}};
}

void from_json(const json& j, RunRecord& v) {
  j.at("query").get_to(v.query);
  j.at("timestamp_ms").get_to(v.timestamp_ms);
  j.at("first_pass").get_to(v.first_pass);
  j.at("decision").get_to(v.decision);
  const auto& rep = j.at("report");
  v.report = rep.is_null() ? std::nullopt
                           : std::optional<report::UncertaintyReport>(
                                 rep.get<report::UncertaintyReport>());
  const auto& second = j.at("second_pass");
  v.second_pass = second.is_null() ? std::nullopt
                                   : std::optional<PassOutcome>(second.get<PassOutcome>());
  j.at("final_text").get_to(v.final_text);
  j.at("degraded").get_to(v.degraded);
  const auto& err = j.at("error");
  v.error = err.is_null() ? std::nullopt : std::optional<std::string>(err.get<std::string>());
  j.at("latency").get_to(v.latency);
  j.at("cost").get_to(v.cost);
}

}  // namespace uloop::orchestrator
