#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uloop/backend.hpp"

namespace uloop::backend {

/// One canned response keyed by (pass index, prompt fingerprint). Matching
/// precedence within a pass: exact prompt hash, then substring, then
/// wildcard; ties resolve to the first entry in file order.
struct ScriptedEntry {
  int pass = 0;
  std::optional<std::uint64_t> prompt_hash;        // exact fingerprint match
  std::optional<std::string> prompt_contains;      // substring of the concatenated contents
  std::optional<std::string> error;                // "transport" | "logprobs_unavailable" | "empty_completion"
  GenerationResult result;
};

/// Deterministic backend replaying canned responses from a fixture file.
/// The same request always yields the same result.
class ScriptedBackend final : public Backend {
 public:
  static ScriptedBackend from_file(const std::filesystem::path& path);
  static ScriptedBackend from_json(const nlohmann::json& doc);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "scripted:" + scenario_; }
  const std::string& scenario() const { return scenario_; }

 private:
  std::string scenario_;
  std::vector<ScriptedEntry> entries_;
};

}  // namespace uloop::backend
