#pragma once

// Serial long-double reference implementations of the uncertainty metrics
// and binning kernels. Kept deliberately independent of the main code path:
// tests compare the optimized kernels against these, and the benchmark uses
// them as the scalar baseline. Nothing here is parallelized.

#include <cstddef>
#include <span>
#include <vector>

#include "uloop/types.hpp"

namespace uloop::reference {

long double perplexity(std::span<const double> logprobs);

long double entropy(std::span<const double> logprobs);

struct Counts {
  std::size_t low = 0;
  std::size_t very_low = 0;
};

Counts confidence_counts(std::span<const TokenObservation> tokens,
                         long double low_threshold = 0.5L,
                         long double very_low_threshold = 0.2L);

struct Metrics {
  long double perplexity = 1.0L;
  std::vector<long double> entropies;
  long double max_entropy = 0.0L;
  long double mean_entropy = 0.0L;
  std::size_t low_conf_count = 0;
  std::size_t very_low_conf_count = 0;
  long double uncertain_fraction = 0.0L;
};

/// Straight-line aggregation of all sequence metrics, one token at a time.
Metrics sequence_metrics(std::span<const TokenObservation> tokens);

/// One histogram bin index per entropy value: bin i covers [i*w, (i+1)*w).
std::vector<std::size_t> histogram_counts(std::span<const double> values,
                                          double bin_width,
                                          std::size_t bin_count);

/// One bin index per sample: lower-inclusive, upper-exclusive, last bin
/// upper-inclusive.
std::vector<std::size_t> assign_bins(std::span<const double> confidences,
                                     std::span<const double> edges);

}  // namespace uloop::reference
