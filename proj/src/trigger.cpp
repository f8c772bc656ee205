#include "uloop/trigger.hpp"

#include <algorithm>
#include <stdexcept>

namespace uloop::trigger {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Perplexity: return "perplexity";
    case Condition::Entropy: return "entropy";
    case Condition::Count: return "count";
  }
  return "unknown";
}

std::string to_string(CauseClass c) {
  switch (c) {
    case CauseClass::GlobalConfusion: return "global_confusion";
    case CauseClass::CriticalDecision: return "critical_decision";
    case CauseClass::Distributed: return "distributed";
    case CauseClass::MultiSignal: return "multi_signal";
    case CauseClass::None: return "none";
  }
  return "unknown";
}

void TriggerConfig::validate() const {
  if (perplexity_threshold <= 0.0) {
    throw std::invalid_argument("trigger: perplexity_threshold must be positive");
  }
  if (max_entropy_threshold <= 0.0) {
    throw std::invalid_argument("trigger: max_entropy_threshold must be positive");
  }
  if (low_conf_min_count == 0) {
    throw std::invalid_argument("trigger: low_conf_min_count must be positive");
  }
  if (low_conf_probability <= 0.0 || low_conf_probability >= 1.0) {
    throw std::invalid_argument("trigger: low_conf_probability must be in (0,1)");
  }
  if (!perplexity_enabled && !entropy_enabled && !count_enabled) {
    throw std::invalid_argument("trigger: at least one condition must be enabled");
  }
}

CauseClass classify_cause(const std::vector<Condition>& fired) {
  if (fired.empty()) return CauseClass::None;
  if (fired.size() >= 2) return CauseClass::MultiSignal;
  switch (fired.front()) {
    case Condition::Perplexity: return CauseClass::GlobalConfusion;
    case Condition::Entropy: return CauseClass::CriticalDecision;
    case Condition::Count: return CauseClass::Distributed;
  }
  return CauseClass::None;
}

TriggerDecision evaluate(const Signals& signals, const TriggerConfig& config) {
  config.validate();

  TriggerDecision decision;
  if (config.perplexity_enabled && signals.perplexity > config.perplexity_threshold) {
    decision.fired.push_back(Condition::Perplexity);
  }
  if (config.entropy_enabled && signals.max_entropy > config.max_entropy_threshold) {
    decision.fired.push_back(Condition::Entropy);
  }
  if (config.count_enabled && signals.low_conf_count >= config.low_conf_min_count) {
    decision.fired.push_back(Condition::Count);
  }
  decision.refine = !decision.fired.empty();
  decision.cause = classify_cause(decision.fired);
  return decision;
}

}  // namespace uloop::trigger
