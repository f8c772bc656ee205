#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uloop/metrics.hpp"
#include "uloop/types.hpp"

namespace uloop::report {

struct ReportConfig {
  double entry_entropy_threshold = 1.0;  // nats
  double low_conf_probability = 0.5;
  std::size_t context_window = 3;  // tokens on each side
  std::optional<std::size_t> max_entries;  // unlimited when unset

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct ReportedAlternative {
  std::string text;
  double probability = 0.0;  // exp(logprob) as reported
  double share = 0.0;        // mass after renormalizing over the listed set

  friend bool operator==(const ReportedAlternative&, const ReportedAlternative&) = default;
};

struct UncertainTokenEntry {
  std::size_t position = 0;
  std::string text;
  double confidence = 0.0;  // chosen-token probability
  std::vector<ReportedAlternative> alternatives;  // descending by probability
  double entropy = 0.0;  // nats, over the listed distribution
  std::vector<std::string> context_before;  // up to context_window tokens
  std::vector<std::string> context_after;

  friend bool operator==(const UncertainTokenEntry&, const UncertainTokenEntry&) = default;
};

struct GlobalStats {
  double perplexity = 1.0;
  double mean_entropy = 0.0;
  std::size_t low_conf_count = 0;
  std::size_t very_low_conf_count = 0;
  double uncertain_fraction = 0.0;

  friend bool operator==(const GlobalStats&, const GlobalStats&) = default;
};

/// Records how the entries were selected so a report is self-describing.
struct SelectionRule {
  double entropy_threshold = 1.0;
  double low_conf_probability = 0.5;
  std::optional<std::size_t> max_entries;

  friend bool operator==(const SelectionRule&, const SelectionRule&) = default;
};

struct UncertaintyReport {
  GlobalStats global;
  std::vector<UncertainTokenEntry> entries;  // sorted by position
  SelectionRule selection;

  friend bool operator==(const UncertaintyReport&, const UncertaintyReport&) = default;
};

/// Selects every position whose entropy exceeds the entry threshold or whose
/// chosen-token probability falls below the low-confidence level. When
/// max_entries caps the list, the highest-entropy positions win and the
/// survivors are re-sorted by position.
UncertaintyReport build(std::span<const TokenObservation> tokens,
                        const metrics::SequenceMetrics& m,
                        const ReportConfig& config);

struct RenderOptions {
  bool include_alternatives = true;
  bool include_context = true;
};

/// Deterministic line-oriented rendering: a global header block, then one
/// line per entry:
///   '<token>' @<pos>: <conf>% | alts: <alt>(<pct>), ... | ctx: ...<before> [token] <after>...
std::string render_text(const UncertaintyReport& report, RenderOptions options = {});

}  // namespace uloop::report
