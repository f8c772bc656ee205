#include "uloop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uloop::metrics {

namespace {

// Applies the (0, 1e-9] -> 0 clamp; anything above that is a data error.
double clamp_logprob(double lp, const char* op) {
  if (lp > kLogprobClamp) {
    throw std::invalid_argument(std::string(op) + ": positive logprob " + std::to_string(lp));
  }
  return lp > 0.0 ? 0.0 : lp;
}

}  // namespace

double perplexity(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw std::invalid_argument("perplexity: empty sequence");
  }
  double sum = 0.0;
  for (double lp : logprobs) {
    sum += clamp_logprob(lp, "perplexity");
  }
  return std::exp(-sum / static_cast<double>(logprobs.size()));
}

double token_entropy(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw std::invalid_argument("token_entropy: empty distribution");
  }
  double mass = 0.0;
  for (double lp : logprobs) {
    mass += std::exp(clamp_logprob(lp, "token_entropy"));
  }
  if (mass <= 0.0) {
    throw std::invalid_argument("token_entropy: underflow, no probability mass after exponentiation");
  }
  double entropy = 0.0;
  for (double lp : logprobs) {
    const double p = std::exp(lp > 0.0 ? 0.0 : lp) / mass;
    if (p > 0.0) {
      entropy -= p * std::log(p);
    }
  }
  return std::max(0.0, entropy);
}

double nats_to_bits(double nats) {
  if (nats < 0.0) {
    throw std::invalid_argument("nats_to_bits: negative entropy");
  }
  return nats / std::log(2.0);
}

std::vector<double> observation_logprobs(const TokenObservation& token) {
  std::vector<double> out;
  out.reserve(token.alternatives.size() + 1);
  bool chosen_listed = false;
  for (const auto& alt : token.alternatives) {
    if (alt.text == token.text) {
      chosen_listed = true;
    }
  }
  if (!chosen_listed) {
    out.push_back(token.logprob);
  }
  for (const auto& alt : token.alternatives) {
    out.push_back(alt.logprob);
  }
  return out;
}

ConfidenceCounts confidence_counts(std::span<const TokenObservation> tokens,
                                   double low_threshold,
                                   double very_low_threshold) {
  if (tokens.empty()) {
    throw std::invalid_argument("confidence_counts: empty sequence");
  }
  ConfidenceCounts counts;
  for (const auto& token : tokens) {
    const double p = std::exp(clamp_logprob(token.logprob, "confidence_counts"));
    if (p < low_threshold) ++counts.low;
    if (p < very_low_threshold) ++counts.very_low;
  }
  counts.uncertain_fraction =
      static_cast<double>(counts.low) / static_cast<double>(tokens.size());
  return counts;
}

SequenceMetrics sequence_metrics(std::span<const TokenObservation> tokens) {
  if (tokens.empty()) {
    throw std::invalid_argument("sequence_metrics: empty sequence");
  }
  const auto n = static_cast<std::ptrdiff_t>(tokens.size());

  SequenceMetrics m;
  m.entropies.resize(tokens.size());

  // Per-position entropies are independent, so the parallel loop is
  // deterministic for any schedule. Failures are collected and re-raised
  // with the offending position.
  std::ptrdiff_t first_bad = -1;
  std::string bad_what;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      m.entropies[static_cast<std::size_t>(i)] =
          token_entropy(observation_logprobs(tokens[static_cast<std::size_t>(i)]));
    } catch (const std::exception& e) {
#pragma omp critical
      if (first_bad < 0 || i < first_bad) {
        first_bad = i;
        bad_what = e.what();
      }
    }
  }
  if (first_bad >= 0) {
    throw std::invalid_argument("sequence_metrics: token " + std::to_string(first_bad) +
                                ": " + bad_what);
  }

  std::vector<double> logprobs(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    logprobs[i] = tokens[i].logprob;
  }
  try {
    m.perplexity = perplexity(logprobs);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("sequence_metrics: ") + e.what());
  }

  m.max_entropy = *std::max_element(m.entropies.begin(), m.entropies.end());
  m.mean_entropy = std::accumulate(m.entropies.begin(), m.entropies.end(), 0.0) /
                   static_cast<double>(tokens.size());

  const auto counts = confidence_counts(tokens);
  m.low_conf_count = counts.low;
  m.very_low_conf_count = counts.very_low;
  m.uncertain_fraction = counts.uncertain_fraction;
  return m;
}

}  // namespace uloop::metrics
