// uloop: uncertainty-aware inference loop.
//
//   uloop run "question"          one query through the loop
//   uloop batch queries.txt       a newline-delimited batch with a summary table
//   uloop calibrate --samples f   calibration bins, both ECE conventions, CSVs
//   uloop simulate                synthetic token streams with target entropy
//
// Backends: an OpenAI-compatible chat-completions server (ULOOP_BASE_URL,
// ULOOP_API_KEY) or a scripted scenario fixture via --mock.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uloop/calibration.hpp"
#include "uloop/config.hpp"
#include "uloop/json_codec.hpp"
#include "uloop/orchestrator.hpp"
#include "uloop/scripted_backend.hpp"
#include "uloop/simulator.hpp"
#include "uloop/trace.hpp"

using namespace uloop;
using nlohmann::json;

namespace {

struct CliFlags {
  std::string config_path;
  std::string mock;
  bool no_refine = false;
  bool verbose = false;
  std::optional<double> threshold_perplexity;
  std::optional<double> threshold_entropy;
  std::optional<std::size_t> threshold_count;
  std::optional<int> top_k;
  std::optional<std::string> trace_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<std::string> model;
};

config::AppConfig resolve_config(const CliFlags& flags) {
  auto app_config = config::defaults();
  if (!flags.config_path.empty()) {
    config::apply_file(app_config, flags.config_path);
  }
  config::apply_env(app_config);

  auto& loop = app_config.loop;
  if (flags.threshold_perplexity) loop.trigger.perplexity_threshold = *flags.threshold_perplexity;
  if (flags.threshold_entropy) loop.trigger.max_entropy_threshold = *flags.threshold_entropy;
  if (flags.threshold_count) loop.trigger.low_conf_min_count = *flags.threshold_count;
  if (flags.top_k) loop.top_k = *flags.top_k;
  if (flags.no_refine) loop.refinement_enabled = false;
  if (flags.model) loop.model_id = *flags.model;
  if (flags.trace_out) app_config.trace_path = *flags.trace_out;
  if (flags.seed) app_config.seed = *flags.seed;
  if (flags.parallelism) app_config.parallelism = *flags.parallelism;
  loop.trigger.validate();
  return app_config;
}

std::filesystem::path resolve_mock_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("ULOOP_FIXTURES")) {
    const auto candidate = fs::path(dir) / (name + ".json");
    if (fs::exists(candidate)) return candidate;
  }
  const auto local = fs::path("fixtures") / (name + ".json");
  if (fs::exists(local)) return local;
  throw std::runtime_error("mock scenario not found: " + name);
}

std::shared_ptr<backend::Backend> make_backend(const CliFlags& flags,
                                               config::AppConfig& app_config) {
  if (!flags.mock.empty()) {
    app_config.loop.deterministic_timing = true;
    if (app_config.loop.model_id.empty()) app_config.loop.model_id = "mock";
    return std::make_shared<backend::ScriptedBackend>(
        backend::ScriptedBackend::from_file(resolve_mock_path(flags.mock)));
  }
  if (app_config.loop.model_id.empty()) {
    throw std::runtime_error("no model configured (set backend.model or ULOOP_MODEL)");
  }
  if (app_config.openai.api_key.empty() &&
      app_config.openai.base_url.find("api.openai.com") != std::string::npos) {
    throw std::runtime_error("no API key for the live backend (set ULOOP_API_KEY)");
  }
  backend::RetryPolicy retry;
  retry.max_attempts = app_config.retry_attempts;
  return backend::make_openai_backend(app_config.openai, retry);
}

void print_verbose(const orchestrator::RunRecord& record) {
  std::cerr << "decision: refine=" << (record.decision.refine ? "yes" : "no") << " fired=[";
  for (std::size_t i = 0; i < record.decision.fired.size(); ++i) {
    if (i > 0) std::cerr << ",";
    std::cerr << trigger::to_string(record.decision.fired[i]);
  }
  std::cerr << "] cause=" << trigger::to_string(record.decision.cause) << "\n";
  std::fprintf(stderr,
               "signals: perplexity=%.4f max_entropy=%.4f low_conf=%zu very_low=%zu\n",
               record.first_pass.metrics.perplexity, record.first_pass.metrics.max_entropy,
               record.first_pass.metrics.low_conf_count,
               record.first_pass.metrics.very_low_conf_count);
  if (record.report) {
    std::cerr << report::render_text(*record.report);
  }
  if (record.degraded) {
    std::cerr << "refinement failed, served the first pass: " << record.error.value_or("?")
              << "\n";
  }
  std::fprintf(stderr, "latency: %.1f ms  cost: %.6f\n", record.latency.total_ms, record.cost);
}

int cmd_run(const CliFlags& flags, const std::string& query) {
  auto app_config = resolve_config(flags);
  auto backend_ptr = make_backend(flags, app_config);
  trace::TraceWriter writer(app_config.trace_path);

  try {
    const auto record = orchestrator::run_query(query, app_config.loop, *backend_ptr);
    writer.append(record);
    if (flags.verbose) print_verbose(record);
    std::cout << record.final_text << "\n";
    return 0;
  } catch (const backend::BackendError& e) {
    writer.append(trace::make_error_line(query, e.what()));
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_batch(const CliFlags& flags, const std::string& query_file) {
  auto app_config = resolve_config(flags);

  std::ifstream in(query_file);
  if (!in) {
    std::cerr << "error: cannot open query file " << query_file << "\n";
    return 1;
  }
  std::vector<std::string> queries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) queries.push_back(line);
  }
  if (queries.empty()) {
    std::cerr << "error: no queries in " << query_file << "\n";
    return 1;
  }

  auto backend_ptr = make_backend(flags, app_config);

  // Queries run concurrently; records land in input order so reruns give
  // identical traces.
  std::vector<std::optional<orchestrator::RunRecord>> records(queries.size());
  std::vector<std::optional<std::string>> failures(queries.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= queries.size()) return;
      try {
        records[i] = orchestrator::run_query(queries[i], app_config.loop, *backend_ptr);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(app_config.parallelism,
                                                static_cast<int>(queries.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  trace::TraceWriter writer(app_config.trace_path);
  std::size_t refined = 0, degraded = 0, failed = 0;
  double latency_sum = 0.0, cost_sum = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (failures[i]) {
      writer.append(trace::make_error_line(queries[i], *failures[i]));
      ++failed;
      continue;
    }
    const auto& record = *records[i];
    writer.append(record);
    if (record.second_pass) ++refined;
    if (record.degraded) ++degraded;
    latency_sum += record.latency.total_ms;
    cost_sum += record.cost;
  }

  const auto completed = queries.size() - failed;
  std::printf("queries:      %zu\n", queries.size());
  std::printf("refined:      %zu (%.2f%%)\n", refined,
              completed > 0 ? 100.0 * static_cast<double>(refined) /
                                  static_cast<double>(completed)
                            : 0.0);
  std::printf("degraded:     %zu\n", degraded);
  std::printf("failed:       %zu\n", failed);
  std::printf("mean latency: %.1f ms\n",
              completed > 0 ? latency_sum / static_cast<double>(completed) : 0.0);
  std::printf("total cost:   %.6f\n", cost_sum);
  std::printf("trace:        %s\n", app_config.trace_path.c_str());
  return failed == 0 ? 0 : 1;
}

// --------------------------------------------------------------------------
// calibrate
// --------------------------------------------------------------------------

std::vector<calibration::LabeledSample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open samples file " + path);
  std::vector<calibration::LabeledSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json doc = json::parse(line);
    const double confidence = doc.at("confidence").get<double>();
    if (doc.contains("count")) {
      // Aggregate row: count samples at this confidence, correct_count true.
      const auto count = doc.at("count").get<std::size_t>();
      const auto correct = doc.at("correct_count").get<std::size_t>();
      for (std::size_t i = 0; i < count; ++i) {
        samples.push_back({confidence, i < correct});
      }
    } else {
      samples.push_back({confidence, doc.at("correct").get<bool>()});
    }
  }
  return samples;
}

void write_bins_csv(const std::filesystem::path& path,
                    const std::vector<calibration::CalibrationBin>& bins) {
  std::ofstream out(path);
  out << "lower_pct,upper_pct,predicted,actual,gap,count\n";
  for (const auto& bin : bins) {
    char buf[160];
    if (bin.actual_accuracy) {
      std::snprintf(buf, sizeof(buf), "%.0f,%.0f,%.4f,%.4f,%.4f,%zu\n", bin.lower_pct,
                    bin.upper_pct, bin.predicted_confidence, *bin.actual_accuracy, bin.gap,
                    bin.token_count);
    } else {
      std::snprintf(buf, sizeof(buf), "%.0f,%.0f,%.4f,,%.4f,%zu\n", bin.lower_pct, bin.upper_pct,
                    bin.predicted_confidence, bin.gap, bin.token_count);
    }
    out << buf;
  }
}

void write_histogram_csv(const std::filesystem::path& dir,
                         const calibration::EntropyHistogram& hist) {
  {
    std::ofstream out(dir / "histogram.csv");
    out << "bin_lower,bin_upper,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%zu\n", hist.bin_width * static_cast<double>(b),
                    hist.bin_width * static_cast<double>(b + 1), hist.counts[b]);
      out << buf;
    }
  }
  std::ofstream out(dir / "bands.csv");
  out << "band,fraction\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "low,%.6f\nmedium,%.6f\nhigh,%.6f\n", hist.low_fraction,
                hist.medium_fraction, hist.high_fraction);
  out << buf;
}

int cmd_calibrate(const std::string& samples_file, const std::string& stream_file,
                  const std::string& trace_file, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (samples_file.empty() && stream_file.empty() && trace_file.empty()) {
    std::cerr << "error: calibrate needs --samples, --stream, or --trace\n";
    return 2;
  }
  fs::create_directories(out_dir);
  json summary;

  if (!samples_file.empty()) {
    const auto samples = load_samples(samples_file);
    if (samples.empty()) {
      std::cerr << "error: no samples in " << samples_file << "\n";
      return 1;
    }
    const auto edges = calibration::five_bin_edges();
    const auto bins = calibration::bin_tokens(samples, edges);
    write_bins_csv(fs::path(out_dir) / "bins.csv", bins);
    summary["samples"] = samples.size();
    summary["ece_gap_sum"] = calibration::ece_gap_sum(bins);
    summary["ece_weighted"] = calibration::ece_weighted(bins, samples.size());
  }

  std::vector<double> entropies;
  if (!stream_file.empty()) {
    const auto stream = simulator::read_stream(stream_file);
    if (stream.empty()) {
      std::cerr << "error: no tokens in " << stream_file << "\n";
      return 1;
    }
    entropies = metrics::sequence_metrics(stream).entropies;
  }
  if (!trace_file.empty()) {
    const auto records = trace::read_records(trace_file);
    if (records.empty()) {
      std::cerr << "error: no run records in " << trace_file << "\n";
      return 1;
    }
    for (const auto& record : records) {
      for (double h : record.first_pass.metrics.entropies) entropies.push_back(h);
      if (record.second_pass) {
        for (double h : record.second_pass->metrics.entropies) entropies.push_back(h);
      }
    }
    const auto mix = calibration::trigger_mix(records);
    summary["trigger_mix"] = {{"any_refined", mix.any_refined},
                              {"global_confusion", mix.global_confusion},
                              {"critical_decision", mix.critical_decision},
                              {"distributed", mix.distributed},
                              {"multi_signal", mix.multi_signal}};
  }
  if (!entropies.empty()) {
    const auto hist = calibration::entropy_histogram(entropies, 0.1);
    write_histogram_csv(out_dir, hist);
    summary["tokens"] = entropies.size();
    summary["bands"] = {{"low", hist.low_fraction},
                        {"medium", hist.medium_fraction},
                        {"high", hist.high_fraction}};
  }

  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const CliFlags& flags, const std::string& profile_file,
                 std::optional<std::size_t> length, const std::string& out_file) {
  auto profile = profile_file.empty() ? simulator::bimodal_profile()
                                      : simulator::profile_from_file(profile_file);
  if (length) {
    profile.min_length = *length;
    profile.max_length = *length;
  }
  if (flags.seed) profile.seed = *flags.seed;

  const auto stream = simulator::sample_stream(profile);
  simulator::write_stream(stream, out_file);

  const auto m = metrics::sequence_metrics(stream);
  const auto hist = calibration::entropy_histogram(m.entropies, 0.1);
  std::printf("tokens:       %zu\n", stream.size());
  std::printf("seed:         %llu\n", static_cast<unsigned long long>(profile.seed));
  std::printf("mean entropy: %.4f nats\n", m.mean_entropy);
  std::printf("max entropy:  %.4f nats\n", m.max_entropy);
  std::printf("bands:        low %.4f / medium %.4f / high %.4f\n", hist.low_fraction,
              hist.medium_fraction, hist.high_fraction);
  std::printf("stream:       %s\n", out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uncertainty-aware inference loop"};
  app.require_subcommand(1);

  CliFlags flags;
  app.add_option("--config", flags.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--mock", flags.mock, "scripted scenario name or fixture path");
  app.add_flag("--no-refine", flags.no_refine, "disable the refinement pass");
  app.add_flag("--verbose,-v", flags.verbose, "print the decision and report");
  app.add_option("--threshold-perplexity", flags.threshold_perplexity,
                 "perplexity trigger threshold")
      ->check(CLI::PositiveNumber);
  app.add_option("--threshold-entropy", flags.threshold_entropy,
                 "max token entropy trigger threshold, nats")
      ->check(CLI::PositiveNumber);
  app.add_option("--threshold-count", flags.threshold_count,
                 "low-confidence token count trigger threshold")
      ->check(CLI::PositiveNumber);
  app.add_option("--top-k", flags.top_k, "alternatives requested per token")
      ->check(CLI::Range(1, 20));
  app.add_option("--trace-out", flags.trace_out, "trace file (line-delimited JSON)");
  app.add_option("--seed", flags.seed, "seed for simulation");
  app.add_option("--parallelism", flags.parallelism, "concurrent queries in batch mode")
      ->check(CLI::PositiveNumber);
  app.add_option("--model", flags.model, "backend model id");

  std::string query, query_file;
  auto* run = app.add_subcommand("run", "run one query through the loop");
  run->add_option("query", query, "the question to ask")->required();

  auto* batch = app.add_subcommand("batch", "run a newline-delimited query file");
  batch->add_option("query_file", query_file, "file with one query per line")->required();

  std::string samples_file, stream_file, trace_file, out_dir = ".";
  auto* calibrate = app.add_subcommand("calibrate", "offline calibration over traces");
  calibrate->add_option("--samples", samples_file,
                        "labeled samples, JSONL of {confidence, correct} or "
                        "{confidence, count, correct_count}");
  calibrate->add_option("--stream", stream_file, "token stream file (JSONL)");
  calibrate->add_option("--trace", trace_file, "trace file of run records");
  calibrate->add_option("--out-dir", out_dir, "directory for CSV output");

  std::string profile_file, stream_out = "stream.jsonl";
  std::optional<std::size_t> sim_length;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic token stream");
  simulate->add_option("--profile", profile_file, "profile JSON (default: stock bimodal)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--length", sim_length, "stream length")->check(CLI::PositiveNumber);
  simulate->add_option("--out", stream_out, "output stream file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(flags, query);
    if (batch->parsed()) return cmd_batch(flags, query_file);
    if (calibrate->parsed()) return cmd_calibrate(samples_file, stream_file, trace_file, out_dir);
    if (simulate->parsed()) return cmd_simulate(flags, profile_file, sim_length, stream_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
