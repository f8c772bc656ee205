#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "uloop/types.hpp"

namespace uloop::backend {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct GenerationRequest {
  std::vector<Message> messages;
  int top_k = 5;  // alternatives per token, 1..20
  int max_tokens = 1024;
  double temperature = 0.7;
  std::string model_id;

  void validate() const;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  friend bool operator==(const Usage&, const Usage&) = default;
};

struct GenerationResult {
  std::string text;
  std::vector<TokenObservation> tokens;
  Usage usage;
  double wall_time_ms = 0.0;
  int attempts = 1;

  friend bool operator==(const GenerationResult&, const GenerationResult&) = default;
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind {
    Transport,            // connection/timeout/5xx-class, retryable
    Upstream,             // definitive upstream rejection
    LogprobsUnavailable,  // response carried no logprobs
    EmptyCompletion,      // upstream returned no tokens
    BadPayload,           // response did not match the wire schema
    Unscripted,           // mock had no entry for the request
  };

  BackendError(Kind kind, const std::string& message, bool retryable, int attempts = 1)
      : std::runtime_error(message), kind_(kind), retryable_(retryable), attempts_(attempts) {}

  Kind kind() const { return kind_; }
  bool retryable() const { return retryable_; }
  int attempts() const { return attempts_; }

 private:
  Kind kind_;
  bool retryable_;
  int attempts_;
};

/// Generation backend contract. Implementations must be safely shareable
/// across concurrent calls; every call is independent.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Enforces the result invariants: non-empty token stream, token texts
/// concatenate to the full text, completion token count matches.
void validate_result(const GenerationResult& result);

/// Stable FNV-1a hash over the concatenated roles and contents.
std::uint64_t fingerprint_hash(const std::vector<Message>& messages);

/// Pass index inferred from prompt structure: a refinement prompt carries the
/// draft as an assistant turn, a first-pass prompt does not.
int infer_pass_index(const std::vector<Message>& messages);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  double backoff_multiplier = 2.0;
};

/// Decorator retrying transient failures with exponential backoff. Successful
/// results report the attempt count that produced them.
class RetryingBackend final : public Backend {
 public:
  RetryingBackend(std::shared_ptr<Backend> inner, RetryPolicy policy)
      : inner_(std::move(inner)), policy_(policy) {}

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<Backend> inner_;
  RetryPolicy policy_;
};

}  // namespace uloop::backend
