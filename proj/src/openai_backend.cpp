#include "uloop/openai_backend.hpp"

#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uloop/logprob_parser.hpp"

namespace uloop::backend {

using nlohmann::json;

namespace {

json build_body(const GenerationRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return json{{"model", request.model_id},
              {"messages", messages},
              {"max_tokens", request.max_tokens},
              {"temperature", request.temperature},
              {"logprobs", true},
              {"top_logprobs", request.top_k}};
}

std::string body_excerpt(const std::string& body) {
  constexpr std::size_t kMax = 240;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

GenerationResult OpenAIBackend::generate(const GenerationRequest& request) {
  request.validate();

  httplib::Client client(settings_.base_url);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + settings_.api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(settings_.completions_path, headers,
                         build_body(request).dump(), "application/json");
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (!res) {
    throw BackendError(BackendError::Kind::Transport,
                       "openai: transport failure: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw BackendError(BackendError::Kind::Transport,
                       "openai: upstream status " + std::to_string(res->status) + ": " +
                           body_excerpt(res->body),
                       true);
  }
  if (res->status != 200) {
    throw BackendError(BackendError::Kind::Upstream,
                       "openai: upstream status " + std::to_string(res->status) + ": " +
                           body_excerpt(res->body),
                       false);
  }

  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::exception& e) {
    throw BackendError(BackendError::Kind::BadPayload,
                       std::string("openai: response is not JSON: ") + e.what(), false);
  }

  GenerationResult result;
  result.tokens = parse_logprob_payload(doc);
  try {
    result.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage")) {
      result.usage.prompt_tokens = doc.at("usage").value("prompt_tokens", 0);
      result.usage.completion_tokens = doc.at("usage").value("completion_tokens", 0);
    } else {
      result.usage.completion_tokens = static_cast<std::int64_t>(result.tokens.size());
    }
  } catch (const json::exception& e) {
    throw BackendError(BackendError::Kind::BadPayload,
                       std::string("parse: $.choices[0].message.content: ") + e.what(), false);
  }
  result.wall_time_ms = wall_ms;
  validate_result(result);
  return result;
}

std::shared_ptr<Backend> make_openai_backend(OpenAISettings settings, RetryPolicy retry) {
  auto inner = std::make_shared<OpenAIBackend>(std::move(settings));
  return std::make_shared<RetryingBackend>(std::move(inner), retry);
}

}  // namespace uloop::backend
