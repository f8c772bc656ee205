#include "uloop/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace uloop::reference {

long double perplexity(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw std::invalid_argument("reference::perplexity: empty sequence");
  }
  long double sum = 0.0L;
  for (double lp : logprobs) {
    sum += (lp > 0.0 ? 0.0L : static_cast<long double>(lp));
  }
  return std::exp(-sum / static_cast<long double>(logprobs.size()));
}

long double entropy(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw std::invalid_argument("reference::entropy: empty distribution");
  }
  long double mass = 0.0L;
  for (double lp : logprobs) {
    mass += std::exp(static_cast<long double>(lp > 0.0 ? 0.0 : lp));
  }
  if (mass <= 0.0L) {
    throw std::invalid_argument("reference::entropy: underflow");
  }
  long double h = 0.0L;
  for (double lp : logprobs) {
    const long double p = std::exp(static_cast<long double>(lp > 0.0 ? 0.0 : lp)) / mass;
    if (p > 0.0L) {
      h -= p * std::log(p);
    }
  }
  return h < 0.0L ? 0.0L : h;
}

Counts confidence_counts(std::span<const TokenObservation> tokens,
                         long double low_threshold,
                         long double very_low_threshold) {
  Counts counts;
  for (const auto& token : tokens) {
    const long double p = std::exp(static_cast<long double>(token.logprob));
    if (p < low_threshold) ++counts.low;
    if (p < very_low_threshold) ++counts.very_low;
  }
  return counts;
}

Metrics sequence_metrics(std::span<const TokenObservation> tokens) {
  if (tokens.empty()) {
    throw std::invalid_argument("reference::sequence_metrics: empty sequence");
  }
  Metrics m;
  m.entropies.reserve(tokens.size());

  long double logprob_sum = 0.0L;
  for (const auto& token : tokens) {
    logprob_sum += (token.logprob > 0.0 ? 0.0L : static_cast<long double>(token.logprob));

    std::vector<double> dist;
    bool chosen_listed = false;
    for (const auto& alt : token.alternatives) {
      if (alt.text == token.text) chosen_listed = true;
    }
    if (!chosen_listed) dist.push_back(token.logprob);
    for (const auto& alt : token.alternatives) dist.push_back(alt.logprob);
    m.entropies.push_back(entropy(dist));
  }
  m.perplexity = std::exp(-logprob_sum / static_cast<long double>(tokens.size()));

  long double sum = 0.0L;
  m.max_entropy = 0.0L;
  for (long double h : m.entropies) {
    sum += h;
    if (h > m.max_entropy) m.max_entropy = h;
  }
  m.mean_entropy = sum / static_cast<long double>(tokens.size());

  const auto counts = confidence_counts(tokens);
  m.low_conf_count = counts.low;
  m.very_low_conf_count = counts.very_low;
  m.uncertain_fraction =
      static_cast<long double>(counts.low) / static_cast<long double>(tokens.size());
  return m;
}

std::vector<std::size_t> histogram_counts(std::span<const double> values,
                                          double bin_width,
                                          std::size_t bin_count) {
  std::vector<std::size_t> counts(bin_count, 0);
  for (double v : values) {
    auto bin = static_cast<std::size_t>(v / bin_width);
    if (bin >= bin_count) bin = bin_count - 1;
    ++counts[bin];
  }
  return counts;
}

std::vector<std::size_t> assign_bins(std::span<const double> confidences,
                                     std::span<const double> edges) {
  std::vector<std::size_t> assignment;
  assignment.reserve(confidences.size());
  const std::size_t bins = edges.size() - 1;
  for (double c : confidences) {
    std::size_t bin = bins - 1;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      if (c >= edges[b] && c < edges[b + 1]) {
        bin = b;
        break;
      }
    }
    assignment.push_back(bin);
  }
  return assignment;
}

}  // namespace uloop::reference
