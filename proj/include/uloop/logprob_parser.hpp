#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uloop/types.hpp"

namespace uloop::backend {

/// Extracts the token stream from a chat-completions response document:
/// choices[0].logprobs.content[] with per-token top_logprobs. Positions are
/// assigned sequentially from 0 and alternatives re-sorted descending by
/// logprob. Missing fields raise BadPayload errors naming the JSON path;
/// an absent or null logprobs object raises LogprobsUnavailable.
std::vector<TokenObservation> parse_logprob_payload(const nlohmann::json& response);

}  // namespace uloop::backend
