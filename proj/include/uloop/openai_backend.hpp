#pragma once

#include <memory>
#include <string>

#include "uloop/backend.hpp"

namespace uloop::backend {

struct OpenAISettings {
  std::string base_url = "https://api.openai.com";
  std::string api_key;
  std::string completions_path = "/v1/chat/completions";
  int timeout_seconds = 120;
};

/// Single-attempt client for any chat-completions server that can return
/// per-token logprobs. Each call opens its own connection, so one instance
/// can serve concurrent requests.
class OpenAIBackend final : public Backend {
 public:
  explicit OpenAIBackend(OpenAISettings settings) : settings_(std::move(settings)) {}

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "openai:" + settings_.base_url; }

 private:
  OpenAISettings settings_;
};

/// Live backend with the standard retry policy applied.
std::shared_ptr<Backend> make_openai_backend(OpenAISettings settings, RetryPolicy retry = {});

}  // namespace uloop::backend
