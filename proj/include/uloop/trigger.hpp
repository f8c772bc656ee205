#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uloop/metrics.hpp"

namespace uloop::trigger {

enum class Condition { Perplexity, Entropy, Count };

enum class CauseClass {
  GlobalConfusion,   // perplexity alone
  CriticalDecision,  // max entropy alone
  Distributed,       // low-confidence count alone
  MultiSignal,       // two or more conditions
  None,
};

std::string to_string(Condition c);
std::string to_string(CauseClass c);

struct TriggerConfig {
  double perplexity_threshold = 1.4;
  double max_entropy_threshold = 1.5;  // nats
  std::size_t low_conf_min_count = 3;
  double low_conf_probability = 0.5;
  bool perplexity_enabled = true;
  bool entropy_enabled = true;
  bool count_enabled = true;

  /// Throws std::invalid_argument when thresholds are non-positive, the
  /// probability is outside (0,1), or every condition is disabled.
  void validate() const;

  friend bool operator==(const TriggerConfig&, const TriggerConfig&) = default;
};

struct TriggerDecision {
  bool refine = false;
  std::vector<Condition> fired;  // listed in perplexity, entropy, count order
  CauseClass cause = CauseClass::None;

  friend bool operator==(const TriggerDecision&, const TriggerDecision&) = default;
};

/// The three signals the decision rule reads. low_conf_count must be counted
/// at the config's low_conf_probability level.
struct Signals {
  double perplexity = 1.0;
  double max_entropy = 0.0;
  std::size_t low_conf_count = 0;
};

/// OR over the enabled conditions: perplexity > threshold, max entropy
/// > threshold (both strict), low-confidence count >= minimum.
TriggerDecision evaluate(const Signals& signals, const TriggerConfig& config);

inline TriggerDecision evaluate(const metrics::SequenceMetrics& m, const TriggerConfig& config) {
  return evaluate(Signals{m.perplexity, m.max_entropy, m.low_conf_count}, config);
}

CauseClass classify_cause(const std::vector<Condition>& fired);

}  // namespace uloop::trigger
