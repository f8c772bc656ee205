#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace uloop {

/// One candidate token at a position, with its natural-log probability.
struct Alternative {
  std::string text;
  double logprob = 0.0;

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// One generated token: surface text, chosen-token logprob, and the top-k
/// alternatives reported by the backend (sorted non-increasing by logprob).
struct TokenObservation {
  std::size_t position = 0;
  std::string text;
  double logprob = 0.0;  // natural log, <= 0
  std::vector<Alternative> alternatives;

  friend bool operator==(const TokenObservation&, const TokenObservation&) = default;
};

}  // namespace uloop
