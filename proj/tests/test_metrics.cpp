#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "helpers.hpp"
#include "uloop/metrics.hpp"
#include "uloop/reference.hpp"

using namespace uloop;
using testutil::demo_stream;
using testutil::random_stream;
using testutil::token_from_probs;

namespace {

bool close_rel(double a, long double b, double rel = 1e-9) {
  const long double scale = std::max<long double>(1.0L, std::abs(b));
  return std::abs(static_cast<long double>(a) - b) <= rel * scale;
}

}  // namespace

// ============================================================================
// perplexity
// ============================================================================

TEST_CASE("perplexity: full certainty is 1") {
  const std::vector<double> logprobs = {0.0, 0.0, 0.0};
  CHECK(metrics::perplexity(logprobs) == doctest::Approx(1.0));
}

TEST_CASE("perplexity: uniform binary choice is 2") {
  const std::vector<double> logprobs = {-0.693147, -0.693147};
  CHECK(metrics::perplexity(logprobs) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("perplexity: matches the extended-precision reference") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> dist(-3.0, 0.0);
  std::vector<double> logprobs(200);
  for (auto& lp : logprobs) lp = dist(rng);

  CHECK(close_rel(metrics::perplexity(logprobs), reference::perplexity(logprobs)));
}

TEST_CASE("perplexity: errors") {
  CHECK_THROWS_WITH_AS(metrics::perplexity({}), doctest::Contains("empty sequence"),
                       std::invalid_argument);
  const std::vector<double> positive = {-0.1, 0.5};
  CHECK_THROWS_WITH_AS(metrics::perplexity(positive), doctest::Contains("positive logprob"),
                       std::invalid_argument);
}

TEST_CASE("perplexity: jitter inside the clamp is treated as certainty") {
  const std::vector<double> logprobs = {1e-10, 5e-10, 0.0};
  CHECK(metrics::perplexity(logprobs) == doctest::Approx(1.0));
}

TEST_CASE("perplexity: invariant under permutation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-4.0, 0.0);
  std::vector<double> logprobs(64);
  for (auto& lp : logprobs) lp = dist(rng);

  const double before = metrics::perplexity(logprobs);
  std::shuffle(logprobs.begin(), logprobs.end(), rng);
  CHECK(metrics::perplexity(logprobs) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("perplexity: appending a logprob-0 token never increases it") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-4.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> logprobs(1 + trial % 20);
    for (auto& lp : logprobs) lp = dist(rng);
    const double before = metrics::perplexity(logprobs);
    logprobs.push_back(0.0);
    CHECK(metrics::perplexity(logprobs) <= before + 1e-12);
  }
}

// ============================================================================
// token_entropy
// ============================================================================

TEST_CASE("token_entropy: point mass is zero") {
  const std::vector<double> dist = {std::log(1.0)};
  CHECK(metrics::token_entropy(dist) == doctest::Approx(0.0));
}

TEST_CASE("token_entropy: even binary split is ln 2") {
  const std::vector<double> dist = {std::log(0.5), std::log(0.5)};
  CHECK(metrics::token_entropy(dist) == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("token_entropy: five-way 28/25/20/15/12 split") {
  const std::vector<double> dist = {std::log(0.28), std::log(0.25), std::log(0.20),
                                    std::log(0.15), std::log(0.12)};
  CHECK(metrics::token_entropy(dist) == doctest::Approx(1.5639).epsilon(0.0005 / 1.5639));
}

TEST_CASE("token_entropy: errors") {
  CHECK_THROWS_WITH_AS(metrics::token_entropy({}), doctest::Contains("empty"),
                       std::invalid_argument);
  const std::vector<double> drowned = {-800.0, -900.0, -1000.0};
  CHECK_THROWS_WITH_AS(metrics::token_entropy(drowned), doctest::Contains("underflow"),
                       std::invalid_argument);
}

TEST_CASE("token_entropy: lone underflowed alternatives just drop out") {
  const std::vector<double> dist = {std::log(0.5), std::log(0.5), -900.0};
  CHECK(metrics::token_entropy(dist) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("token_entropy: invariant under permutation and constant shift") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> dist(-6.0, 0.0);
  std::uniform_real_distribution<double> shift_dist(-30.0, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> logprobs(2 + trial % 7);
    for (auto& lp : logprobs) lp = dist(rng);
    const double base = metrics::token_entropy(logprobs);

    std::shuffle(logprobs.begin(), logprobs.end(), rng);
    CHECK(metrics::token_entropy(logprobs) == doctest::Approx(base).epsilon(1e-12));

    const double shift = shift_dist(rng);
    std::vector<double> shifted = logprobs;
    for (auto& lp : shifted) lp += shift;
    CHECK(metrics::token_entropy(shifted) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("token_entropy: uniform maximizes at ln k, point mass floors at 0") {
  for (int k = 1; k <= 8; ++k) {
    std::vector<double> uniform(static_cast<std::size_t>(k), std::log(1.0 / k));
    CHECK(metrics::token_entropy(uniform) ==
          doctest::Approx(std::log(static_cast<double>(k))).epsilon(1e-12));

    std::vector<double> point(static_cast<std::size_t>(k), -60.0);
    point[0] = 0.0;
    CHECK(metrics::token_entropy(point) == doctest::Approx(0.0).epsilon(1e-9));

    // Any other distribution over k stays below ln k.
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> dist(-4.0, 0.0);
    std::vector<double> other(static_cast<std::size_t>(k));
    for (auto& lp : other) lp = dist(rng);
    CHECK(metrics::token_entropy(other) <= std::log(static_cast<double>(k)) + 1e-12);
  }
}

// ============================================================================
// nats_to_bits
// ============================================================================

TEST_CASE("nats_to_bits") {
  CHECK(metrics::nats_to_bits(0.0) == 0.0);
  CHECK(metrics::nats_to_bits(0.693147) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(metrics::nats_to_bits(1.5639) == doctest::Approx(2.2562).epsilon(0.001 / 2.2562));
  CHECK_THROWS_AS(metrics::nats_to_bits(-0.1), std::invalid_argument);
}

// ============================================================================
// confidence_counts
// ============================================================================

TEST_CASE("confidence_counts: mixed band example") {
  std::vector<TokenObservation> tokens;
  const std::vector<double> probs = {0.9, 0.45, 0.15, 0.6};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    tokens.push_back(token_from_probs(i, {probs[i], probs[i] / 2.0}));
  }
  const auto counts = metrics::confidence_counts(tokens);
  CHECK(counts.low == 2);
  CHECK(counts.very_low == 1);
  CHECK(counts.uncertain_fraction == doctest::Approx(0.5));
}

TEST_CASE("confidence_counts: fully confident stream") {
  std::vector<TokenObservation> tokens;
  for (std::size_t i = 0; i < 5; ++i) tokens.push_back(token_from_probs(i, {1.0}));
  const auto counts = metrics::confidence_counts(tokens);
  CHECK(counts.low == 0);
  CHECK(counts.very_low == 0);
  CHECK(counts.uncertain_fraction == 0.0);
}

TEST_CASE("confidence_counts: everything below both bands") {
  std::vector<TokenObservation> tokens;
  for (std::size_t i = 0; i < 8; ++i) tokens.push_back(token_from_probs(i, {0.19, 0.19, 0.19}));
  const auto counts = metrics::confidence_counts(tokens);
  CHECK(counts.low == 8);
  CHECK(counts.very_low == 8);
  CHECK(counts.uncertain_fraction == doctest::Approx(1.0));
}

TEST_CASE("confidence_counts: empty input throws") {
  CHECK_THROWS_WITH_AS(metrics::confidence_counts({}), doctest::Contains("empty"),
                       std::invalid_argument);
}

TEST_CASE("confidence_counts: monotone as any probability decreases") {
  std::mt19937_64 rng(31337);
  auto stream = random_stream(rng, 40, 4);
  const auto before = metrics::confidence_counts(stream);
  std::uniform_int_distribution<std::size_t> pick(0, stream.size() - 1);
  for (int trial = 0; trial < 30; ++trial) {
    auto lowered = stream;
    const auto i = pick(rng);
    lowered[i].logprob -= 0.5;  // decrease the chosen-token probability
    const auto after = metrics::confidence_counts(lowered);
    CHECK(after.low >= before.low);
  }
}

// ============================================================================
// sequence_metrics
// ============================================================================

TEST_CASE("sequence_metrics: single fully confident token") {
  const std::vector<TokenObservation> tokens = {token_from_probs(0, {1.0})};
  const auto m = metrics::sequence_metrics(tokens);
  CHECK(m.perplexity == doctest::Approx(1.0));
  CHECK(m.max_entropy == doctest::Approx(0.0));
  CHECK(m.low_conf_count == 0);
  CHECK(m.very_low_conf_count == 0);
}

TEST_CASE("sequence_metrics: demo scenario lands on its scripted signals") {
  const auto stream = demo_stream();
  const auto m = metrics::sequence_metrics(stream);
  CHECK(m.perplexity == doctest::Approx(1.35).epsilon(1e-9));
  CHECK(m.max_entropy == doctest::Approx(1.5639).epsilon(0.0005 / 1.5639));
  CHECK(m.low_conf_count == 8);
  CHECK(m.very_low_conf_count == 0);
  CHECK(m.entropies.size() == stream.size());
  CHECK(m.uncertain_fraction == doctest::Approx(8.0 / 30.0));
}

TEST_CASE("sequence_metrics: random stream matches the reference everywhere") {
  std::mt19937_64 rng(2024);
  const auto stream = random_stream(rng, 50, 5);
  const auto m = metrics::sequence_metrics(stream);
  const auto ref = reference::sequence_metrics(stream);

  CHECK(close_rel(m.perplexity, ref.perplexity));
  CHECK(close_rel(m.max_entropy, ref.max_entropy));
  CHECK(close_rel(m.mean_entropy, ref.mean_entropy));
  CHECK(m.low_conf_count == ref.low_conf_count);
  CHECK(m.very_low_conf_count == ref.very_low_conf_count);
  REQUIRE(m.entropies.size() == ref.entropies.size());
  for (std::size_t i = 0; i < m.entropies.size(); ++i) {
    CHECK(close_rel(m.entropies[i], ref.entropies[i]));
  }
}

TEST_CASE("sequence_metrics: 1000 random sequences agree with the reference") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<std::size_t> length_dist(1, 60);
  std::uniform_int_distribution<int> k_dist(1, 8);

  for (int trial = 0; trial < 1000; ++trial) {
    const auto stream = random_stream(rng, length_dist(rng), k_dist(rng));
    const auto m = metrics::sequence_metrics(stream);
    const auto ref = reference::sequence_metrics(stream);
    REQUIRE(close_rel(m.perplexity, ref.perplexity));
    REQUIRE(close_rel(m.max_entropy, ref.max_entropy));
    REQUIRE(close_rel(m.mean_entropy, ref.mean_entropy));
    REQUIRE(m.low_conf_count == ref.low_conf_count);
    REQUIRE(m.very_low_conf_count == ref.very_low_conf_count);
  }
}

TEST_CASE("sequence_metrics: errors carry the offending position") {
  std::mt19937_64 rng(11);
  auto stream = random_stream(rng, 6, 3);
  for (auto& alt : stream[2].alternatives) alt.logprob = -900.0;
  stream[2].logprob = -900.0;
  stream[2].text = stream[2].alternatives[0].text;  // keep the prepend rule out of it
  CHECK_THROWS_WITH_AS(metrics::sequence_metrics(stream), doctest::Contains("token 2"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(metrics::sequence_metrics({}), doctest::Contains("empty"),
                       std::invalid_argument);
}

TEST_CASE("sequence_metrics: chosen token absent from alternatives is prepended") {
  TokenObservation token;
  token.position = 0;
  token.text = "zebra";
  token.logprob = std::log(0.5);
  token.alternatives = {{"apple", std::log(0.25)}, {"pear", std::log(0.25)}};

  const auto dist = metrics::observation_logprobs(token);
  REQUIRE(dist.size() == 3);
  // {0.5, 0.25, 0.25} renormalizes to itself: H = 1.5 ln 2 - ... = 1.0397
  CHECK(metrics::token_entropy(dist) == doctest::Approx(1.03972).epsilon(1e-5));

  // Listed chosen token is not duplicated.
  token.alternatives.insert(token.alternatives.begin(), {"zebra", std::log(0.5)});
  CHECK(metrics::observation_logprobs(token).size() == 3);
}

#ifdef _OPENMP
TEST_CASE("sequence_metrics: identical results for any thread count") {
  std::mt19937_64 rng(404);
  const auto stream = random_stream(rng, 4096, 5);

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto serial = metrics::sequence_metrics(stream);
  omp_set_num_threads(saved > 1 ? saved : 4);
  const auto parallel = metrics::sequence_metrics(stream);
  omp_set_num_threads(saved);

  CHECK(serial == parallel);
}
#endif
