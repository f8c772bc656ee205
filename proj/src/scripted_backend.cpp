#include "uloop/scripted_backend.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "uloop/json_codec.hpp"

namespace uloop::backend {

using nlohmann::json;

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("scripted: cannot open scenario file " + path.string());
  }
  json doc;
  in >> doc;
  return from_json(doc);
}

ScriptedBackend ScriptedBackend::from_json(const json& doc) {
  ScriptedBackend backend;
  backend.scenario_ = doc.at("name").get<std::string>();
  for (const auto& item : doc.at("responses")) {
    ScriptedEntry entry;
    entry.pass = item.at("pass").get<int>();
    if (item.contains("prompt")) {
      // Hash the authored prompt the same way requests are fingerprinted:
      // a single user turn carrying this content.
      entry.prompt_hash =
          fingerprint_hash({{"user", item.at("prompt").get<std::string>()}});
    }
    if (item.contains("prompt_hash")) {
      entry.prompt_hash = std::stoull(item.at("prompt_hash").get<std::string>(), nullptr, 16);
    }
    if (item.contains("prompt_contains")) {
      entry.prompt_contains = item.at("prompt_contains").get<std::string>();
    }
    if (item.contains("error")) {
      entry.error = item.at("error").get<std::string>();
    } else {
      entry.result = item.at("result").get<GenerationResult>();
    }
    backend.entries_.push_back(std::move(entry));
  }
  return backend;
}

GenerationResult ScriptedBackend::generate(const GenerationRequest& request) {
  request.validate();
  const int pass = infer_pass_index(request.messages);
  const std::uint64_t hash = fingerprint_hash(request.messages);

  std::string concatenated;
  for (const auto& m : request.messages) concatenated += m.content;

  const ScriptedEntry* match = nullptr;
  int best_rank = 3;  // 0 exact, 1 contains, 2 wildcard
  for (const auto& entry : entries_) {
    if (entry.pass != pass) continue;
    int rank;
    if (entry.prompt_hash) {
      if (*entry.prompt_hash != hash) continue;
      rank = 0;
    } else if (entry.prompt_contains) {
      if (concatenated.find(*entry.prompt_contains) == std::string::npos) continue;
      rank = 1;
    } else {
      rank = 2;
    }
    if (rank < best_rank) {
      best_rank = rank;
      match = &entry;
    }
  }
  if (match == nullptr) {
    throw BackendError(BackendError::Kind::Unscripted,
                       "scripted: unscripted request (scenario " + scenario_ + ", pass " +
                           std::to_string(pass) + ")",
                       false);
  }
  if (match->error) {
    if (*match->error == "transport") {
      throw BackendError(BackendError::Kind::Transport, "scripted: transport failure", true);
    }
    if (*match->error == "logprobs_unavailable") {
      throw BackendError(BackendError::Kind::LogprobsUnavailable,
                         "scripted: logprobs unavailable", false);
    }
    if (*match->error == "empty_completion") {
      throw BackendError(BackendError::Kind::EmptyCompletion, "scripted: empty completion", false);
    }
    throw BackendError(BackendError::Kind::Upstream, "scripted: " + *match->error, false);
  }
  GenerationResult result = match->result;
  validate_result(result);
  return result;
}

}  // namespace uloop::backend
