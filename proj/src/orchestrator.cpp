#include "uloop/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace uloop::orchestrator {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

backend::GenerationRequest make_request(const LoopConfig& config,
                                        std::vector<backend::Message> messages,
                                        bool refinement) {
  backend::GenerationRequest request;
  request.messages = std::move(messages);
  request.top_k = config.top_k;
  request.max_tokens = config.max_tokens;
  request.temperature = config.temperature;
  request.model_id = refinement && config.refinement_model ? *config.refinement_model
                                                           : config.model_id;
  return request;
}

constexpr const char* kRefinementInstruction =
    "The draft above was produced with the uncertainty measurements shown below. "
    "Review each listed token and the alternatives considered at that position, "
    "and revise the draft only where the measurements point to a real problem. "
    "Prioritize factual accuracy over stylistic variations, reconsider the listed "
    "tokens against their alternatives, and keep everything that is already well "
    "supported. Reply with the full revised answer.";

}  // namespace

std::vector<backend::Message> build_refinement_prompt(const std::string& query,
                                                      const std::string& first_pass_text,
                                                      const report::UncertaintyReport& rep,
                                                      const LoopConfig& config) {
  report::RenderOptions options;
  options.include_alternatives = config.include_alternatives_in_report;
  options.include_context = config.include_context_in_report;

  std::vector<backend::Message> messages;
  messages.push_back({"user", query});
  messages.push_back({"assistant", first_pass_text});
  messages.push_back({"user", std::string(kRefinementInstruction) + "\n\n" +
                                  report::render_text(rep, options)});
  return messages;
}

double estimate_cost(std::span<const backend::Usage> usages, const CostModel& model) {
  if (model.prompt_price < 0.0 || model.completion_price < 0.0) {
    throw std::invalid_argument("cost: prices must be non-negative");
  }
  double total = 0.0;
  for (const auto& usage : usages) {
    if (usage.prompt_tokens < 0 || usage.completion_tokens < 0) {
      throw std::invalid_argument("cost: token counts must be non-negative");
    }
    total += (static_cast<double>(usage.prompt_tokens) * model.prompt_price +
              static_cast<double>(usage.completion_tokens) * model.completion_price) /
             1000.0;
  }
  return total;
}

double amortized_overhead(double base_ms, double refine_ms, double refine_rate) {
  if (base_ms <= 0.0) {
    throw std::invalid_argument("amortized_overhead: base latency must be positive");
  }
  if (refine_rate < 0.0 || refine_rate > 1.0) {
    throw std::invalid_argument("amortized_overhead: rate must be in [0,1]");
  }
  return 100.0 * (refine_rate * refine_ms) / base_ms;
}

RunRecord run_query(const std::string& query, const LoopConfig& config,
                    backend::Backend& backend) {
  config.trigger.validate();

  RunRecord record;
  record.query = query;
  record.timestamp_ms =
      config.deterministic_timing
          ? 0
          : std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();

  // Stage 1: first-pass generation with logprobs.
  auto t0 = Clock::now();
  record.first_pass.result =
      backend.generate(make_request(config, {{"user", query}}, false));
  record.latency.generation_ms = elapsed_ms(t0);

  t0 = Clock::now();
  backend::validate_result(record.first_pass.result);
  record.latency.logprob_extraction_ms = elapsed_ms(t0);

  // Stage 2: uncertainty metrics.
  t0 = Clock::now();
  record.first_pass.metrics = metrics::sequence_metrics(record.first_pass.result.tokens);
  record.latency.metric_ms = elapsed_ms(t0);

  // Stage 3: trigger decision. The count signal is recounted when the
  // configured probability level differs from the stock 0.5 band.
  t0 = Clock::now();
  trigger::Signals signals{record.first_pass.metrics.perplexity,
                           record.first_pass.metrics.max_entropy,
                           record.first_pass.metrics.low_conf_count};
  if (config.trigger.low_conf_probability != metrics::kLowConfidence) {
    signals.low_conf_count =
        metrics::confidence_counts(record.first_pass.result.tokens,
                                   config.trigger.low_conf_probability)
            .low;
  }
  record.decision = trigger::evaluate(signals, config.trigger);
  record.latency.trigger_ms = elapsed_ms(t0);

  record.final_text = record.first_pass.result.text;

  // Stages 4-5: at most one refinement pass, then record.
  if (record.decision.refine && config.refinement_enabled) {
    t0 = Clock::now();
    record.report = report::build(record.first_pass.result.tokens, record.first_pass.metrics,
                                  config.report);
    record.latency.report_ms = elapsed_ms(t0);

    t0 = Clock::now();
    try {
      auto messages = build_refinement_prompt(query, record.first_pass.result.text,
                                              *record.report, config);
      PassOutcome second;
      second.result = backend.generate(make_request(config, std::move(messages), true));
      backend::validate_result(second.result);
      second.metrics = metrics::sequence_metrics(second.result.tokens);
      record.second_pass = std::move(second);
      record.final_text = record.second_pass->result.text;
    } catch (const std::exception& e) {
      // Keep the draft; a failed refinement must not lose a good answer.
      record.degraded = true;
      record.error = e.what();
    }
    record.latency.refinement_ms = elapsed_ms(t0);
  }

  if (config.deterministic_timing) {
    record.latency = {};
    record.latency.generation_ms = record.first_pass.result.wall_time_ms;
    if (record.second_pass) {
      record.latency.refinement_ms = record.second_pass->result.wall_time_ms;
    }
  }
  record.latency.total_ms = record.latency.component_sum();

  std::vector<backend::Usage> usages{record.first_pass.result.usage};
  if (record.second_pass) usages.push_back(record.second_pass->result.usage);
  record.cost = estimate_cost(usages, config.cost_model);
  return record;
}

}  // namespace uloop::orchestrator
