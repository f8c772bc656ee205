#include "uloop/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uloop::report {

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\n\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\n\r");
  return s.substr(begin, end - begin + 1);
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

UncertainTokenEntry make_entry(std::span<const TokenObservation> tokens,
                               std::size_t pos,
                               double entropy,
                               std::size_t window) {
  const TokenObservation& token = tokens[pos];
  UncertainTokenEntry entry;
  entry.position = pos;
  entry.text = trimmed(token.text);
  entry.confidence = std::exp(token.logprob > 0.0 ? 0.0 : token.logprob);
  entry.entropy = entropy;

  const auto dist = metrics::observation_logprobs(token);
  double mass = 0.0;
  for (double lp : dist) mass += std::exp(lp > 0.0 ? 0.0 : lp);

  bool chosen_listed = false;
  for (const auto& alt : token.alternatives) {
    if (alt.text == token.text) chosen_listed = true;
  }
  if (!chosen_listed) {
    const double p = std::exp(token.logprob > 0.0 ? 0.0 : token.logprob);
    entry.alternatives.push_back({entry.text, p, p / mass});
  }
  for (const auto& alt : token.alternatives) {
    const double p = std::exp(alt.logprob > 0.0 ? 0.0 : alt.logprob);
    entry.alternatives.push_back({trimmed(alt.text), p, p / mass});
  }
  std::stable_sort(entry.alternatives.begin(), entry.alternatives.end(),
                   [](const auto& a, const auto& b) { return a.probability > b.probability; });

  const std::size_t lo = pos >= window ? pos - window : 0;
  for (std::size_t i = lo; i < pos; ++i) entry.context_before.push_back(trimmed(tokens[i].text));
  const std::size_t hi = std::min(tokens.size(), pos + window + 1);
  for (std::size_t i = pos + 1; i < hi; ++i) entry.context_after.push_back(trimmed(tokens[i].text));
  return entry;
}

}  // namespace

UncertaintyReport build(std::span<const TokenObservation> tokens,
                        const metrics::SequenceMetrics& m,
                        const ReportConfig& config) {
  if (m.entropies.size() != tokens.size()) {
    throw std::invalid_argument("report: metrics do not match the token stream");
  }

  UncertaintyReport report;
  report.global = {m.perplexity, m.mean_entropy, m.low_conf_count, m.very_low_conf_count,
                   m.uncertain_fraction};
  report.selection = {config.entry_entropy_threshold, config.low_conf_probability,
                      config.max_entries};

  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double p = std::exp(tokens[i].logprob > 0.0 ? 0.0 : tokens[i].logprob);
    if (m.entropies[i] > config.entry_entropy_threshold || p < config.low_conf_probability) {
      selected.push_back(i);
    }
  }
  if (config.max_entries && selected.size() > *config.max_entries) {
    std::stable_sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
      return m.entropies[a] > m.entropies[b];
    });
    selected.resize(*config.max_entries);
    std::sort(selected.begin(), selected.end());
  }

  report.entries.reserve(selected.size());
  for (std::size_t pos : selected) {
    report.entries.push_back(make_entry(tokens, pos, m.entropies[pos], config.context_window));
  }
  return report;
}

std::string render_text(const UncertaintyReport& report, RenderOptions options) {
  std::string out;
  out += "== uncertainty report ==\n";
  out += "perplexity: " + fixed4(report.global.perplexity) + "\n";
  out += "mean entropy: " + fixed4(report.global.mean_entropy) + " nats\n";
  out += "low-confidence tokens (p < 0.5): " + std::to_string(report.global.low_conf_count) + "\n";
  out += "very-low-confidence tokens (p < 0.2): " +
         std::to_string(report.global.very_low_conf_count) + "\n";
  out += "uncertain fraction: " + percent(report.global.uncertain_fraction) + "\n";

  if (report.entries.empty()) {
    return out;
  }

  out += "uncertain tokens:\n";
  for (const auto& entry : report.entries) {
    out += "'" + entry.text + "' @" + std::to_string(entry.position) + ": " +
           percent(entry.confidence);
    if (options.include_alternatives && !entry.alternatives.empty()) {
      out += " | alts: ";
      for (std::size_t i = 0; i < entry.alternatives.size(); ++i) {
        if (i > 0) out += ", ";
        out += entry.alternatives[i].text + "(" + percent(entry.alternatives[i].probability) + ")";
      }
    }
    if (options.include_context) {
      out += " | ctx: ...";
      for (const auto& t : entry.context_before) out += t + " ";
      out += "[" + entry.text + "]";
      for (const auto& t : entry.context_after) out += " " + t;
      out += "...";
    }
    out += "\n";
  }
  return out;
}

}  // namespace uloop::report
