#pragma once

// Shared test utilities: fixture paths, token builders, and the random
// stream generator used by the oracle-equivalence suites.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "uloop/types.hpp"

namespace testutil {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(ULOOP_FIXTURE_DIR) / name;
}

/// Token whose alternatives are the given probabilities (descending not
/// required; they get sorted). The chosen token is the most probable one.
inline uloop::TokenObservation token_from_probs(std::size_t position,
                                                std::vector<double> probs,
                                                const std::string& text = {}) {
  std::sort(probs.begin(), probs.end(), std::greater<>());
  uloop::TokenObservation token;
  token.position = position;
  token.text = text.empty() ? "w" + std::to_string(position) : text;
  token.logprob = std::log(probs.front());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const std::string alt_text = i == 0 ? token.text : token.text + "#" + std::to_string(i);
    token.alternatives.push_back({alt_text, std::log(probs[i])});
  }
  return token;
}

/// Random sequence with a fixed k. Roughly a third of the tokens leave the
/// chosen token out of the alternatives list to exercise the prepend rule.
inline std::vector<uloop::TokenObservation> random_stream(std::mt19937_64& rng,
                                                          std::size_t length,
                                                          int k) {
  std::uniform_real_distribution<double> logprob_dist(-5.0, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<uloop::TokenObservation> stream;
  stream.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<double> logprobs(static_cast<std::size_t>(k));
    for (auto& lp : logprobs) lp = logprob_dist(rng);
    std::sort(logprobs.begin(), logprobs.end(), std::greater<>());

    uloop::TokenObservation token;
    token.position = i;
    const bool chosen_listed = unit(rng) > 0.3;
    if (chosen_listed) {
      token.text = "w" + std::to_string(i);
      token.logprob = logprobs.front();
      for (std::size_t j = 0; j < logprobs.size(); ++j) {
        token.alternatives.push_back(
            {j == 0 ? token.text : "w" + std::to_string(i) + "#" + std::to_string(j),
             logprobs[j]});
      }
    } else {
      token.text = "x" + std::to_string(i);
      token.logprob = logprob_dist(rng);
      for (std::size_t j = 0; j < logprobs.size(); ++j) {
        token.alternatives.push_back({"w" + std::to_string(i) + "#" + std::to_string(j),
                                      logprobs[j]});
      }
    }
    stream.push_back(std::move(token));
  }
  return stream;
}

/// The demo scenario stream: 30 tokens, overall perplexity 1.35, a five-way
/// split at position 15 peaking at ~1.5639 nats, and eight tokens below 0.5.
/// Mirrors the agi_2030 scripted fixture.
inline std::vector<uloop::TokenObservation> demo_stream() {
  const std::vector<std::string> words = {
      "Most",   " experts", " consider", " the",     " timeline", " deeply",
      " uncertain", ",",    " but",      " several", " recent",   " forecasts",
      " suggest",   " AGI", " is",       " likely",  " within",   " the",
      " decade",    ".",    " Progress", " in",      " scaling",  " could",
      " make",      " it",  " arrive",   " near",    " 2030",     "."};

  struct Spot {
    std::size_t position;
    std::vector<double> probs;
    std::vector<std::string> alt_texts;
  };
  const std::vector<Spot> spots = {
      {5, {0.45, 0.35, 0.15, 0.03, 0.02}, {}},
      {10, {0.48, 0.30, 0.15, 0.05, 0.02}, {}},
      {15, {0.28, 0.25, 0.20, 0.15, 0.12},
       {" likely", " unlikely", " possible", " uncertain", " improbable"}},
      {18, {0.40, 0.35, 0.20, 0.03, 0.02}, {}},
      {23, {0.49, 0.30, 0.15, 0.04, 0.02}, {}},
      {26, {0.35, 0.30, 0.20, 0.10, 0.05}, {}},
      {27, {0.46, 0.25, 0.15, 0.09, 0.05}, {}},
      {28, {0.412, 0.30, 0.20, 0.05, 0.038}, {" 2030", " 2035", " 2040", " 2028", " 2050"}},
  };
  const std::vector<double> confident = {0.92, 0.05, 0.02, 0.007, 0.003};

  std::vector<uloop::TokenObservation> stream(words.size());
  double known_sum = 0.0;
  for (std::size_t i = 1; i < words.size(); ++i) {
    const Spot* spot = nullptr;
    for (const auto& s : spots) {
      if (s.position == i) spot = &s;
    }
    const auto& probs = spot ? spot->probs : confident;

    uloop::TokenObservation token;
    token.position = i;
    token.text = words[i];
    token.logprob = std::log(probs[0]);
    known_sum += token.logprob;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      std::string alt_text = words[i];
      if (spot && !spot->alt_texts.empty()) {
        alt_text = spot->alt_texts[j];
      } else if (j > 0) {
        alt_text = words[i] + "#" + std::to_string(j);
      }
      token.alternatives.push_back({alt_text, std::log(probs[j])});
    }
    stream[i] = std::move(token);
  }

  // Position 0 absorbs the remainder so the mean logprob lands exactly on
  // a perplexity of 1.35.
  const double total = -(static_cast<double>(words.size()) * std::log(1.35));
  uloop::TokenObservation head;
  head.position = 0;
  head.text = words[0];
  head.logprob = total - known_sum;
  head.alternatives = {{words[0], head.logprob},
                       {words[0] + "#1", std::log(0.05)},
                       {words[0] + "#2", std::log(0.03)},
                       {words[0] + "#3", std::log(0.012)},
                       {words[0] + "#4", std::log(0.006)}};
  stream[0] = std::move(head);
  return stream;
}

}  // namespace testutil
