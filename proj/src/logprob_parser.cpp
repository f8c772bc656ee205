#include "uloop/logprob_parser.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "uloop/backend.hpp"
#include "uloop/metrics.hpp"

namespace uloop::backend {

namespace {

using nlohmann::json;

[[noreturn]] void bad_payload(const std::string& path, const std::string& what) {
  throw BackendError(BackendError::Kind::BadPayload, "parse: " + path + ": " + what, false);
}

const json& expect(const json& node, const char* key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) {
    bad_payload(path + "." + key, "missing field");
  }
  return node.at(key);
}

double expect_logprob(const json& node, const std::string& path) {
  if (!node.is_number()) bad_payload(path, "expected a number");
  const double lp = node.get<double>();
  if (lp > metrics::kLogprobClamp) {
    bad_payload(path, "positive logprob " + std::to_string(lp));
  }
  return lp > 0.0 ? 0.0 : lp;
}

}  // namespace

std::vector<TokenObservation> parse_logprob_payload(const json& response) {
  const json& choices = expect(response, "choices", "$");
  if (!choices.is_array() || choices.empty()) {
    bad_payload("$.choices", "expected a non-empty array");
  }
  const json& choice = choices.at(0);

  if (!choice.contains("logprobs") || choice.at("logprobs").is_null()) {
    throw BackendError(BackendError::Kind::LogprobsUnavailable,
                       "parse: $.choices[0].logprobs: logprobs unavailable", false);
  }
  const json& content = expect(choice.at("logprobs"), "content", "$.choices[0].logprobs");
  if (!content.is_array()) {
    bad_payload("$.choices[0].logprobs.content", "expected an array");
  }

  std::vector<TokenObservation> tokens;
  tokens.reserve(content.size());
  for (std::size_t i = 0; i < content.size(); ++i) {
    const std::string path = "$.choices[0].logprobs.content[" + std::to_string(i) + "]";
    const json& item = content.at(i);

    TokenObservation token;
    token.position = i;
    const json& text = expect(item, "token", path);
    if (!text.is_string()) bad_payload(path + ".token", "expected a string");
    token.text = text.get<std::string>();
    token.logprob = expect_logprob(expect(item, "logprob", path), path + ".logprob");

    const json& top = expect(item, "top_logprobs", path);
    if (!top.is_array()) bad_payload(path + ".top_logprobs", "expected an array");
    token.alternatives.reserve(top.size());
    for (std::size_t j = 0; j < top.size(); ++j) {
      const std::string alt_path = path + ".top_logprobs[" + std::to_string(j) + "]";
      const json& alt = top.at(j);
      const json& alt_text = expect(alt, "token", alt_path);
      if (!alt_text.is_string()) bad_payload(alt_path + ".token", "expected a string");
      token.alternatives.push_back(
          {alt_text.get<std::string>(),
           expect_logprob(expect(alt, "logprob", alt_path), alt_path + ".logprob")});
    }
    // Upstream order is usually already descending; normalize anyway.
    std::stable_sort(token.alternatives.begin(), token.alternatives.end(),
                     [](const Alternative& a, const Alternative& b) { return a.logprob > b.logprob; });
    tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace uloop::backend
