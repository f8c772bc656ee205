#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uloop/types.hpp"

namespace uloop::metrics {

// Positive logprobs up to this value are treated as 0 (API float jitter);
// anything larger is rejected.
inline constexpr double kLogprobClamp = 1e-9;

// Confidence bands: a token is low-confidence below 0.5, very-low below 0.2.
inline constexpr double kLowConfidence = 0.5;
inline constexpr double kVeryLowConfidence = 0.2;

// exp() of anything at or below this underflows to zero in double precision.
inline constexpr double kUnderflowLogprob = -745.0;

struct ConfidenceCounts {
  std::size_t low = 0;       // chosen-token p < 0.5
  std::size_t very_low = 0;  // chosen-token p < 0.2
  double uncertain_fraction = 0.0;
};

/// Aggregate uncertainty signals for one generation.
struct SequenceMetrics {
  double perplexity = 1.0;
  std::vector<double> entropies;  // nats, aligned index-for-index with tokens
  double max_entropy = 0.0;
  double mean_entropy = 0.0;
  std::size_t low_conf_count = 0;
  std::size_t very_low_conf_count = 0;
  double uncertain_fraction = 0.0;

  friend bool operator==(const SequenceMetrics&, const SequenceMetrics&) = default;
};

/// exp(-mean(logprobs)) over the chosen-token logprobs of a sequence.
/// Values in (0, kLogprobClamp] clamp to 0; larger positive values throw.
double perplexity(std::span<const double> logprobs);

/// Shannon entropy in nats of the distribution obtained by exponentiating
/// and renormalizing the given logprobs. Uses the 0*ln(0) = 0 convention.
/// Throws "underflow" when the whole distribution exponentiates to zero.
double token_entropy(std::span<const double> logprobs);

double nats_to_bits(double nats);

/// Logprob list for one observation's distribution. The chosen token is
/// prepended when the backend's alternatives do not already contain it.
std::vector<double> observation_logprobs(const TokenObservation& token);

ConfidenceCounts confidence_counts(std::span<const TokenObservation> tokens,
                                   double low_threshold = kLowConfidence,
                                   double very_low_threshold = kVeryLowConfidence);

/// Full per-sequence aggregation: perplexity, per-token entropies, counts.
/// Entropy evaluation is parallelized across positions; results are
/// deterministic regardless of thread count.
SequenceMetrics sequence_metrics(std::span<const TokenObservation> tokens);

}  // namespace uloop::metrics
