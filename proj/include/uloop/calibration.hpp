#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uloop/orchestrator.hpp"

namespace uloop::calibration {

struct LabeledSample {
  double confidence = 0.0;  // in [0,1]
  bool correct = false;
};

struct CalibrationBin {
  double lower_pct = 0.0;   // bounds in percent, [lower, upper)
  double upper_pct = 0.0;   // last bin closes at 100 inclusive
  double predicted_confidence = 0.0;  // bin midpoint as a fraction
  std::optional<double> actual_accuracy;  // unset for empty bins
  double gap = 0.0;  // |predicted - actual|, 0 for empty bins
  std::size_t token_count = 0;
};

/// Assigns each sample to exactly one bin (lower-inclusive, upper-exclusive,
/// last bin upper-inclusive). Edges are fractions, strictly increasing, and
/// must cover [0,1]. Out-of-range confidences are errors.
std::vector<CalibrationBin> bin_tokens(std::span<const LabeledSample> samples,
                                       std::span<const double> edges);

inline std::vector<double> five_bin_edges() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}; }

/// Unweighted sum of per-bin gaps. Empty bins contribute 0.
double ece_gap_sum(std::span<const CalibrationBin> bins);

/// Standard count-weighted calibration error: sum of (count/total) * gap.
double ece_weighted(std::span<const CalibrationBin> bins, std::size_t total);

struct EntropyHistogram {
  double bin_width = 0.1;            // nats
  std::vector<std::size_t> counts;   // bin i covers [i*w, (i+1)*w)
  std::size_t total = 0;
  double low_fraction = 0.0;     // entropy in [0, 0.5)
  double medium_fraction = 0.0;  // [0.5, 1.0)
  double high_fraction = 0.0;    // [1.0, inf)
};

/// Histogram over raw per-token entropies plus the three band fractions.
/// Bands are cut at 0.5 and 1.0 nats (lower-inclusive) from the raw values,
/// so they do not move when the bin width changes.
EntropyHistogram entropy_histogram(std::span<const double> entropies, double bin_width);

struct TriggerMix {
  bool any_refined = false;  // false when no record triggered
  double global_confusion = 0.0;
  double critical_decision = 0.0;
  double distributed = 0.0;
  double multi_signal = 0.0;
};

/// Fractions per cause class over the records whose trigger fired.
TriggerMix trigger_mix(std::span<const orchestrator::RunRecord> records);

}  // namespace uloop::calibration
