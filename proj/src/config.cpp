#include "uloop/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uloop::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, const char* name,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : section.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("config: unknown key \"" + key + "\" in section " + name);
    }
  }
}

}  // namespace

AppConfig defaults() { return AppConfig{}; }

void apply_file(AppConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path.string() + ": " + e.what());
  }
  reject_unknown(doc, "<root>", {"trigger", "report", "loop", "cost", "backend", "trace_path",
                                 "parallelism", "seed"});

  if (doc.contains("trigger")) {
    const auto& t = doc.at("trigger");
    reject_unknown(t, "trigger",
                   {"perplexity_threshold", "max_entropy_threshold", "low_conf_min_count",
                    "low_conf_probability", "perplexity_enabled", "entropy_enabled",
                    "count_enabled"});
    auto& trig = config.loop.trigger;
    trig.perplexity_threshold = t.value("perplexity_threshold", trig.perplexity_threshold);
    trig.max_entropy_threshold = t.value("max_entropy_threshold", trig.max_entropy_threshold);
    trig.low_conf_min_count = t.value("low_conf_min_count", trig.low_conf_min_count);
    trig.low_conf_probability = t.value("low_conf_probability", trig.low_conf_probability);
    trig.perplexity_enabled = t.value("perplexity_enabled", trig.perplexity_enabled);
    trig.entropy_enabled = t.value("entropy_enabled", trig.entropy_enabled);
    trig.count_enabled = t.value("count_enabled", trig.count_enabled);
  }
  if (doc.contains("report")) {
    const auto& r = doc.at("report");
    reject_unknown(r, "report",
                   {"entry_entropy_threshold", "low_conf_probability", "context_window",
                    "max_entries"});
    auto& rep = config.loop.report;
    rep.entry_entropy_threshold = r.value("entry_entropy_threshold", rep.entry_entropy_threshold);
    rep.low_conf_probability = r.value("low_conf_probability", rep.low_conf_probability);
    rep.context_window = r.value("context_window", rep.context_window);
    if (r.contains("max_entries") && !r.at("max_entries").is_null()) {
      rep.max_entries = r.at("max_entries").get<std::size_t>();
    }
  }
  if (doc.contains("loop")) {
    const auto& l = doc.at("loop");
    reject_unknown(l, "loop",
                   {"refinement_enabled", "include_alternatives_in_report",
                    "include_context_in_report", "deterministic_timing"});
    config.loop.refinement_enabled = l.value("refinement_enabled", config.loop.refinement_enabled);
    config.loop.include_alternatives_in_report =
        l.value("include_alternatives_in_report", config.loop.include_alternatives_in_report);
    config.loop.include_context_in_report =
        l.value("include_context_in_report", config.loop.include_context_in_report);
    config.loop.deterministic_timing =
        l.value("deterministic_timing", config.loop.deterministic_timing);
  }
  if (doc.contains("cost")) {
    const auto& c = doc.at("cost");
    reject_unknown(c, "cost", {"prompt_price", "completion_price"});
    config.loop.cost_model.prompt_price =
        c.value("prompt_price", config.loop.cost_model.prompt_price);
    config.loop.cost_model.completion_price =
        c.value("completion_price", config.loop.cost_model.completion_price);
  }
  if (doc.contains("backend")) {
    const auto& b = doc.at("backend");
    reject_unknown(b, "backend",
                   {"base_url", "model", "refinement_model", "top_k", "max_tokens", "temperature",
                    "retry_attempts", "timeout_seconds"});
    config.openai.base_url = b.value("base_url", config.openai.base_url);
    config.loop.model_id = b.value("model", config.loop.model_id);
    if (b.contains("refinement_model")) {
      config.loop.refinement_model = b.at("refinement_model").get<std::string>();
    }
    config.loop.top_k = b.value("top_k", config.loop.top_k);
    config.loop.max_tokens = b.value("max_tokens", config.loop.max_tokens);
    config.loop.temperature = b.value("temperature", config.loop.temperature);
    config.retry_attempts = b.value("retry_attempts", config.retry_attempts);
    config.openai.timeout_seconds = b.value("timeout_seconds", config.openai.timeout_seconds);
  }
  config.trace_path = doc.value("trace_path", config.trace_path);
  config.parallelism = doc.value("parallelism", config.parallelism);
  config.seed = doc.value("seed", config.seed);
}

void apply_env(AppConfig& config, const EnvReader& getenv_fn) {
  auto read = [&](const char* name) -> const char* {
    return getenv_fn ? getenv_fn(name) : std::getenv(name);
  };
  if (const char* v = read("ULOOP_BASE_URL")) config.openai.base_url = v;
  if (const char* v = read("ULOOP_API_KEY")) config.openai.api_key = v;
  if (const char* v = read("ULOOP_MODEL")) config.loop.model_id = v;
  if (const char* v = read("ULOOP_TRACE")) config.trace_path = v;
}

}  // namespace uloop::config
