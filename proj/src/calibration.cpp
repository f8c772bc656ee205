#include "uloop/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace uloop::calibration {

namespace {

std::size_t bin_index(double confidence, std::span<const double> edges) {
  const std::size_t bins = edges.size() - 1;
  // Last bin is upper-inclusive.
  if (confidence >= edges[bins - 1]) return bins - 1;
  std::size_t lo = 0, hi = bins - 1;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (confidence >= edges[mid]) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return confidence >= edges[lo + 1] ? lo + 1 : lo;
}

}  // namespace

std::vector<CalibrationBin> bin_tokens(std::span<const LabeledSample> samples,
                                       std::span<const double> edges) {
  if (edges.size() < 2) {
    throw std::invalid_argument("bin_tokens: need at least two edges");
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i] >= edges[i + 1]) {
      throw std::invalid_argument("bin_tokens: edges must be strictly increasing");
    }
  }
  if (edges.front() != 0.0 || edges.back() != 1.0) {
    throw std::invalid_argument("bin_tokens: edges must cover [0,1]");
  }
  for (const auto& sample : samples) {
    if (!(sample.confidence >= 0.0 && sample.confidence <= 1.0)) {  // also rejects NaN
      throw std::invalid_argument("bin_tokens: confidence out of [0,1]");
    }
  }

  const std::size_t bin_count = edges.size() - 1;
  std::vector<std::size_t> counts(bin_count, 0);
  std::vector<std::size_t> correct(bin_count, 0);

  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel
  {
    std::vector<std::size_t> local_counts(bin_count, 0);
    std::vector<std::size_t> local_correct(bin_count, 0);
#pragma omp for nowait schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& sample = samples[static_cast<std::size_t>(i)];
      const std::size_t b = bin_index(sample.confidence, edges);
      ++local_counts[b];
      if (sample.correct) ++local_correct[b];
    }
#pragma omp critical
    for (std::size_t b = 0; b < bin_count; ++b) {
      counts[b] += local_counts[b];
      correct[b] += local_correct[b];
    }
  }

  std::vector<CalibrationBin> bins(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    bins[b].lower_pct = edges[b] * 100.0;
    bins[b].upper_pct = edges[b + 1] * 100.0;
    bins[b].predicted_confidence = (edges[b] + edges[b + 1]) / 2.0;
    bins[b].token_count = counts[b];
    if (counts[b] > 0) {
      bins[b].actual_accuracy =
          static_cast<double>(correct[b]) / static_cast<double>(counts[b]);
      bins[b].gap = std::abs(bins[b].predicted_confidence - *bins[b].actual_accuracy);
    }
  }
  return bins;
}

double ece_gap_sum(std::span<const CalibrationBin> bins) {
  double sum = 0.0;
  for (const auto& bin : bins) sum += bin.gap;
  return sum;
}

double ece_weighted(std::span<const CalibrationBin> bins, std::size_t total) {
  if (total == 0) {
    throw std::invalid_argument("ece_weighted: total must be positive");
  }
  std::size_t counted = 0;
  double sum = 0.0;
  for (const auto& bin : bins) {
    counted += bin.token_count;
    sum += (static_cast<double>(bin.token_count) / static_cast<double>(total)) * bin.gap;
  }
  if (counted != total) {
    throw std::invalid_argument("ece_weighted: total does not match bin counts");
  }
  return sum;
}

EntropyHistogram entropy_histogram(std::span<const double> entropies, double bin_width) {
  if (bin_width <= 0.0) {
    throw std::invalid_argument("entropy_histogram: bin width must be positive");
  }
  double max_entropy = 0.0;
  for (double h : entropies) {
    if (!(h >= 0.0)) throw std::invalid_argument("entropy_histogram: negative entropy");
    max_entropy = std::max(max_entropy, h);
  }

  EntropyHistogram hist;
  hist.bin_width = bin_width;
  hist.total = entropies.size();
  const auto bin_count = static_cast<std::size_t>(max_entropy / bin_width) + 1;
  hist.counts.assign(entropies.empty() ? 0 : bin_count, 0);

  std::size_t low = 0, medium = 0, high = 0;
  const auto n = static_cast<std::ptrdiff_t>(entropies.size());
#pragma omp parallel
  {
    std::vector<std::size_t> local(hist.counts.size(), 0);
    std::size_t l = 0, m = 0, h = 0;
#pragma omp for nowait schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double v = entropies[static_cast<std::size_t>(i)];
      auto b = static_cast<std::size_t>(v / bin_width);
      if (b >= local.size()) b = local.size() - 1;
      ++local[b];
      if (v < 0.5) {
        ++l;
      } else if (v < 1.0) {
        ++m;
      } else {
        ++h;
      }
    }
#pragma omp critical
    {
      for (std::size_t b = 0; b < local.size(); ++b) hist.counts[b] += local[b];
      low += l;
      medium += m;
      high += h;
    }
  }

  if (hist.total > 0) {
    const auto total = static_cast<double>(hist.total);
    hist.low_fraction = static_cast<double>(low) / total;
    hist.medium_fraction = static_cast<double>(medium) / total;
    hist.high_fraction = static_cast<double>(high) / total;
  }
  return hist;
}

TriggerMix trigger_mix(std::span<const orchestrator::RunRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("trigger_mix: empty record list");
  }
  std::size_t refined = 0;
  std::size_t global = 0, critical = 0, distributed = 0, multi = 0;
  for (const auto& record : records) {
    if (!record.decision.refine) continue;
    ++refined;
    switch (record.decision.cause) {
      case trigger::CauseClass::GlobalConfusion: ++global; break;
      case trigger::CauseClass::CriticalDecision: ++critical; break;
      case trigger::CauseClass::Distributed: ++distributed; break;
      case trigger::CauseClass::MultiSignal: ++multi; break;
      case trigger::CauseClass::None: break;
    }
  }
  TriggerMix mix;
  if (refined == 0) return mix;
  mix.any_refined = true;
  const auto total = static_cast<double>(refined);
  mix.global_confusion = static_cast<double>(global) / total;
  mix.critical_decision = static_cast<double>(critical) / total;
  mix.distributed = static_cast<double>(distributed) / total;
  mix.multi_signal = static_cast<double>(multi) / total;
  return mix;
}

}  // namespace uloop::calibration
