#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uloop/backend.hpp"
#include "uloop/metrics.hpp"
#include "uloop/report.hpp"
#include "uloop/trigger.hpp"

namespace uloop::orchestrator {

struct CostModel {
  double prompt_price = 0.0;      // currency per 1K prompt tokens
  double completion_price = 0.0;  // currency per 1K completion tokens

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

struct LoopConfig {
  trigger::TriggerConfig trigger;
  report::ReportConfig report;
  bool refinement_enabled = true;
  bool include_alternatives_in_report = true;
  bool include_context_in_report = true;
  CostModel cost_model;

  // Request shape shared by both passes.
  std::string model_id;
  std::optional<std::string> refinement_model;  // defaults to model_id
  int top_k = 5;
  int max_tokens = 1024;
  double temperature = 0.7;

  // Scripted runs use the backend-reported wall times and zero timestamps so
  // traces are byte-identical across reruns.
  bool deterministic_timing = false;
};

struct PassOutcome {
  backend::GenerationResult result;
  metrics::SequenceMetrics metrics;

  friend bool operator==(const PassOutcome&, const PassOutcome&) = default;
};

struct LatencyBreakdown {
  double generation_ms = 0.0;
  double logprob_extraction_ms = 0.0;
  double metric_ms = 0.0;
  double trigger_ms = 0.0;
  double report_ms = 0.0;
  double refinement_ms = 0.0;  // 0 when refinement is skipped
  double total_ms = 0.0;       // sum of the components

  double component_sum() const {
    return generation_ms + logprob_extraction_ms + metric_ms + trigger_ms + report_ms +
           refinement_ms;
  }

  friend bool operator==(const LatencyBreakdown&, const LatencyBreakdown&) = default;
};

/// Full trace of one query through the loop.
struct RunRecord {
  std::string query;
  std::int64_t timestamp_ms = 0;  // unix epoch ms at start; 0 in deterministic mode
  PassOutcome first_pass;
  trigger::TriggerDecision decision;
  std::optional<report::UncertaintyReport> report;
  std::optional<PassOutcome> second_pass;
  std::string final_text;
  bool degraded = false;  // refinement failed, answer fell back to the first pass
  std::optional<std::string> error;
  LatencyBreakdown latency;
  double cost = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// One query through the five stages: generate with logprobs, measure,
/// decide, optionally build the report and refine once, record. Never makes
/// more than two backend calls. A first-pass failure propagates as
/// BackendError; a refinement failure degrades to the first-pass answer with
/// the record flagged.
RunRecord run_query(const std::string& query, const LoopConfig& config, backend::Backend& backend);

/// Refinement prompt: the original question, the draft as an assistant turn,
/// then the rendered uncertainty report with a fixed instruction that puts
/// factual accuracy over stylistic variations and points at the listed
/// tokens. Deterministic for fixed inputs.
std::vector<backend::Message> build_refinement_prompt(const std::string& query,
                                                      const std::string& first_pass_text,
                                                      const report::UncertaintyReport& rep,
                                                      const LoopConfig& config);

double estimate_cost(std::span<const backend::Usage> usages, const CostModel& model);

/// Average latency added by refinement across all requests, in percent:
/// 100 * rate * refine_ms / base_ms.
double amortized_overhead(double base_ms, double refine_ms, double refine_rate);

}  // namespace uloop::orchestrator
