#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "uloop/backend.hpp"
#include "uloop/openai_backend.hpp"
#include "uloop/orchestrator.hpp"

namespace uloop::config {

/// Everything the CLI needs to run. Layered resolution: defaults, then the
/// config file, then environment variables, then command-line flags.
struct AppConfig {
  orchestrator::LoopConfig loop;
  backend::OpenAISettings openai;
  int retry_attempts = 3;
  std::string trace_path = "traces.jsonl";
  int parallelism = 1;
  std::uint64_t seed = 42;
};

AppConfig defaults();

/// Applies a JSON config file with sections "trigger", "report", "loop",
/// "cost", and "backend". Unknown keys are rejected so typos surface.
void apply_file(AppConfig& config, const std::filesystem::path& path);

using EnvReader = std::function<const char*(const char*)>;

/// Environment layer: ULOOP_BASE_URL, ULOOP_API_KEY, ULOOP_MODEL,
/// ULOOP_TRACE. The reader is injectable for tests; the default reads the
/// process environment.
void apply_env(AppConfig& config, const EnvReader& getenv_fn = nullptr);

}  // namespace uloop::config
