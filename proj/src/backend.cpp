#include "uloop/backend.hpp"

#include <thread>

namespace uloop::backend {

void GenerationRequest::validate() const {
  if (messages.empty()) {
    throw std::invalid_argument("request: messages must be non-empty");
  }
  if (top_k < 1 || top_k > 20) {
    throw std::invalid_argument("request: top_k must be in 1..20");
  }
  if (max_tokens < 1) {
    throw std::invalid_argument("request: max_tokens must be >= 1");
  }
}

void validate_result(const GenerationResult& result) {
  if (result.tokens.empty() || result.text.empty()) {
    throw BackendError(BackendError::Kind::EmptyCompletion, "backend: empty completion", false);
  }
  std::string joined;
  for (const auto& token : result.tokens) joined += token.text;
  if (joined != result.text) {
    throw BackendError(BackendError::Kind::BadPayload,
                       "backend: token texts do not concatenate to the result text", false);
  }
  if (result.usage.completion_tokens != static_cast<std::int64_t>(result.tokens.size())) {
    throw BackendError(BackendError::Kind::BadPayload,
                       "backend: completion token count does not match the token stream", false);
  }
}

std::uint64_t fingerprint_hash(const std::vector<Message>& messages) {
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
  auto mix = [&hash](const std::string& s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 1099511628211ull;
    }
    hash ^= 0x1f;  // field separator
    hash *= 1099511628211ull;
  };
  for (const auto& m : messages) {
    mix(m.role);
    mix(m.content);
  }
  return hash;
}

int infer_pass_index(const std::vector<Message>& messages) {
  for (const auto& m : messages) {
    if (m.role == "assistant") return 1;
  }
  return 0;
}

GenerationResult RetryingBackend::generate(const GenerationRequest& request) {
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      GenerationResult result = inner_->generate(request);
      result.attempts = attempt;
      return result;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= policy_.max_attempts) {
        throw BackendError(e.kind(), e.what(), e.retryable(), attempt);
      }
      if (backoff.count() > 0) {
        std::this_thread::sleep_for(backoff);
      }
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * policy_.backoff_multiplier));
    }
  }
}

}  // namespace uloop::backend
