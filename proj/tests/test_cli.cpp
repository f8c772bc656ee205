#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "proc.hpp"
#include "uloop/json_codec.hpp"
#include "uloop/trace.hpp"

using namespace uloop;
using nlohmann::json;
using testutil::fixture_path;
using testutil::run_cli;
using testutil::slurp;

namespace {

namespace fs = std::filesystem;

std::string quoted(const fs::path& path) { return "\"" + path.string() + "\""; }

fs::path temp_path(const std::string& name) {
  const auto path = fs::temp_directory_path() / name;
  fs::remove(path);
  return path;
}

std::string mock_flag(const std::string& scenario) {
  return "--mock " + quoted(fixture_path(scenario + ".json"));
}

constexpr const char* kAgiQuery =
    "'Is artificial general intelligence likely to be achieved by 2030?'";

}  // namespace

TEST_CASE("run: uncertain scenario prints the refined answer and one trace line") {
  const auto trace_path = temp_path("cli_run_trace.jsonl");
  const auto result = run_cli(mock_flag("agi_2030") + " --trace-out " + quoted(trace_path) +
                              " -v run " + kAgiQuery);
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("genuinely uncertain") != std::string::npos);
  CHECK(result.err.find("fired=[entropy,count]") != std::string::npos);
  CHECK(result.err.find("'likely' @15: 28.0%") != std::string::npos);

  const auto records = trace::read_records(trace_path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].decision.fired ==
        std::vector<trigger::Condition>{trigger::Condition::Entropy, trigger::Condition::Count});
  CHECK(records[0].second_pass.has_value());
  fs::remove(trace_path);
}

TEST_CASE("run: --no-refine records a single backend pass") {
  const auto trace_path = temp_path("cli_norefine_trace.jsonl");
  const auto result = run_cli(mock_flag("agi_2030") + " --no-refine --trace-out " +
                              quoted(trace_path) + " run " + kAgiQuery);
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("Most experts consider") == 0);  // the draft, not the refinement

  const auto records = trace::read_records(trace_path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].decision.refine);  // signals still measured
  CHECK_FALSE(records[0].second_pass.has_value());
  CHECK_FALSE(records[0].report.has_value());
  fs::remove(trace_path);
}

TEST_CASE("run: invalid threshold flag is a usage error, exit 2") {
  CHECK(run_cli(mock_flag("confident") + " --threshold-perplexity -1 run 'q'").exit_code == 2);
  CHECK(run_cli(mock_flag("confident") + " --threshold-entropy 0 run 'q'").exit_code == 2);
  CHECK(run_cli("run").exit_code == 2);  // missing query
}

TEST_CASE("run: scenario names resolve through ULOOP_FIXTURES") {
  const auto trace_path = temp_path("cli_fixdir_trace.jsonl");
  const auto result =
      run_cli("--mock confident --trace-out " + quoted(trace_path) +
                  " run 'What is the capital of France?'",
              "ULOOP_FIXTURES=" + fixture_path("").string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("Paris") != std::string::npos);
  fs::remove(trace_path);

  CHECK(run_cli("--mock no_such_scenario run 'q'").exit_code == 1);
}

TEST_CASE("run: backend failure exits nonzero with a diagnostic and an error line") {
  const auto trace_path = temp_path("cli_fail_trace.jsonl");
  const auto result = run_cli(mock_flag("confident") + " --trace-out " + quoted(trace_path) +
                              " run 'a question nobody scripted'");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("unscripted request") != std::string::npos);

  const auto lines = trace::read_lines(trace_path);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].at("kind").get<std::string>() == "error");
  fs::remove(trace_path);
}

TEST_CASE("run: flags override the config file") {
  const auto config_path = temp_path("cli_config.json");
  {
    std::ofstream out(config_path);
    out << R"({"trigger": {"perplexity_threshold": 9.0, "entropy_enabled": false,
                "count_enabled": false}})";
  }
  const auto trace_path = temp_path("cli_override_trace.jsonl");

  // With the file alone nothing fires; the flag drops the bar below 1.35.
  auto result = run_cli(mock_flag("agi_2030") + " --config " + quoted(config_path) +
                        " --trace-out " + quoted(trace_path) + " run " + kAgiQuery);
  CHECK(result.exit_code == 0);
  auto records = trace::read_records(trace_path);
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].decision.refine);

  fs::remove(trace_path);
  result = run_cli(mock_flag("agi_2030") + " --config " + quoted(config_path) +
                   " --threshold-perplexity 1.2 --trace-out " + quoted(trace_path) + " run " +
                   kAgiQuery);
  CHECK(result.exit_code == 0);
  records = trace::read_records(trace_path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].decision.refine);
  CHECK(records[0].decision.fired ==
        std::vector<trigger::Condition>{trigger::Condition::Perplexity});

  fs::remove(config_path);
  fs::remove(trace_path);
}

TEST_CASE("config precedence matrix: flags > environment > file > defaults") {
  // One knob, the trace path, is settable at every layer.
  const auto config_path = temp_path("cli_prec_config.json");
  const auto file_trace = temp_path("cli_prec_file.jsonl");
  const auto env_trace = temp_path("cli_prec_env.jsonl");
  const auto flag_trace = temp_path("cli_prec_flag.jsonl");
  {
    std::ofstream out(config_path);
    out << R"({"trace_path": ")" << file_trace.string() << R"("})";
  }
  const auto base = mock_flag("confident") + " --config " + quoted(config_path);
  const auto env = "ULOOP_TRACE=" + env_trace.string();
  const auto query = " run 'What is the capital of France?'";

  // File layer beats the default.
  CHECK(run_cli(base + query).exit_code == 0);
  CHECK(fs::exists(file_trace));
  fs::remove(file_trace);

  // Environment beats the file.
  CHECK(run_cli(base + query, env).exit_code == 0);
  CHECK(fs::exists(env_trace));
  CHECK_FALSE(fs::exists(file_trace));
  fs::remove(env_trace);

  // Flag beats the environment.
  CHECK(run_cli(base + " --trace-out " + quoted(flag_trace) + query, env).exit_code == 0);
  CHECK(fs::exists(flag_trace));
  CHECK_FALSE(fs::exists(env_trace));

  fs::remove(config_path);
  fs::remove(flag_trace);
}

TEST_CASE("batch: sixteen scripted queries refine at exactly 31.25%") {
  const auto trace_path = temp_path("cli_batch_trace.jsonl");
  const auto args = mock_flag("batch16") + " --parallelism 4 --trace-out " + quoted(trace_path) +
                    " batch " + quoted(fixture_path("batch16_queries.txt"));

  const auto first = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out.find("refined:      5 (31.25%)") != std::string::npos);
  const auto first_trace = slurp(trace_path);

  const auto records = trace::read_records(trace_path);
  REQUIRE(records.size() == 16);
  std::size_t refined = 0;
  for (const auto& record : records) {
    if (record.second_pass) ++refined;
  }
  CHECK(refined == 5);

  // Rerun: identical summary, byte-identical trace.
  fs::remove(trace_path);
  const auto second = run_cli(args);
  CHECK(second.out == first.out);
  CHECK(slurp(trace_path) == first_trace);
  fs::remove(trace_path);
}

TEST_CASE("batch: empty query file is an error") {
  const auto empty = temp_path("cli_empty_queries.txt");
  std::ofstream(empty).close();
  const auto result = run_cli(mock_flag("batch16") + " batch " + quoted(empty));
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("no queries") != std::string::npos);
  fs::remove(empty);
}

TEST_CASE("calibrate: labeled-sample fixture reproduces both ECE figures") {
  const auto out_dir = fs::temp_directory_path() / "cli_caldir";
  fs::remove_all(out_dir);
  const auto result = run_cli("calibrate --samples " + quoted(fixture_path("labeled_samples.jsonl")) +
                              " --out-dir " + quoted(out_dir));
  CHECK(result.exit_code == 0);

  const auto summary = json::parse(result.out);
  CHECK(summary.at("ece_gap_sum").get<double>() == doctest::Approx(0.088).epsilon(0.0115));
  CHECK(summary.at("ece_weighted").get<double>() == doctest::Approx(0.0198).epsilon(0.025));

  const auto bins_csv = slurp(out_dir / "bins.csv");
  CHECK(bins_csv.find("lower_pct,upper_pct,predicted,actual,gap,count") == 0);
  CHECK(bins_csv.find("80,100,0.9000,0.9180,0.0180,21192") != std::string::npos);
  fs::remove_all(out_dir);
}

TEST_CASE("calibrate: empty or missing inputs are errors") {
  CHECK(run_cli("calibrate").exit_code == 2);

  const auto empty = temp_path("cli_empty_trace.jsonl");
  std::ofstream(empty).close();
  CHECK(run_cli("calibrate --trace " + quoted(empty)).exit_code == 1);
  fs::remove(empty);
}

TEST_CASE("calibrate: simulated stream band fractions sum to one") {
  const auto stream_path = temp_path("cli_stream.jsonl");
  const auto out_dir = fs::temp_directory_path() / "cli_caldir2";
  fs::remove_all(out_dir);

  CHECK(run_cli("--seed 7 simulate --length 5000 --out " + quoted(stream_path)).exit_code == 0);
  const auto result =
      run_cli("calibrate --stream " + quoted(stream_path) + " --out-dir " + quoted(out_dir));
  CHECK(result.exit_code == 0);

  double total = 0.0;
  std::ifstream bands(out_dir / "bands.csv");
  std::string line;
  std::getline(bands, line);  // header
  while (std::getline(bands, line)) {
    total += std::stod(line.substr(line.find(',') + 1));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  fs::remove(stream_path);
  fs::remove_all(out_dir);
}

TEST_CASE("simulate: single-token stream is a valid file") {
  const auto stream_path = temp_path("cli_one_token.jsonl");
  const auto result = run_cli("--seed 5 simulate --length 1 --out " + quoted(stream_path));
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("tokens:       1") != std::string::npos);

  std::ifstream in(stream_path);
  std::string line;
  REQUIRE(std::getline(in, line));
  const auto token = json::parse(line).get<TokenObservation>();
  CHECK(token.position == 0);
  fs::remove(stream_path);
}

TEST_CASE("simulate: fixed seed reproduces the stream byte for byte") {
  const auto a = temp_path("cli_stream_a.jsonl");
  const auto b = temp_path("cli_stream_b.jsonl");
  const auto first = run_cli("--seed 11 simulate --length 500 --out " + quoted(a));
  const auto second = run_cli("--seed 11 simulate --length 500 --out " + quoted(b));
  CHECK(first.out.substr(0, first.out.find("stream:")) ==
        second.out.substr(0, second.out.find("stream:")));
  CHECK(slurp(a) == slurp(b));

  const auto other = run_cli("--seed 12 simulate --length 500 --out " + quoted(a));
  CHECK(slurp(a) != slurp(b));
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("simulate: profile fixture drives the stream") {
  const auto stream_path = temp_path("cli_profile_stream.jsonl");
  const auto result = run_cli("simulate --profile " + quoted(fixture_path("profile_bimodal.json")) +
                              " --length 2000 --out " + quoted(stream_path));
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("seed:         42") != std::string::npos);
  fs::remove(stream_path);
}
