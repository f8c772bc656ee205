#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "uloop/types.hpp"

namespace uloop::simulator {

struct MixtureComponent {
  double weight = 1.0;
  double target_entropy = 0.0;  // nats, in [0, ln k]
  double spread = 0.0;          // uniform jitter applied to the target
};

struct SyntheticProfile {
  std::vector<MixtureComponent> components;
  std::size_t min_length = 1;
  std::size_t max_length = 1;
  int top_k = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Stock bimodal profile: mostly confident tokens around 0.2 nats, a medium
/// shoulder at 0.75, and an uncertain mode at 1.3 nats.
SyntheticProfile bimodal_profile(std::size_t length = 50000, std::uint64_t seed = 42);

/// Probability vector over k outcomes whose entropy is within 1e-6 nats of
/// the target, built by interpolating between a point mass and the uniform
/// distribution (entropy is continuous and strictly increasing along that
/// path, so bisection converges). First component is always the largest.
std::vector<double> entropy_to_distribution(double target_entropy, int k);

/// Synthesizes a token stream under the profile. Every position draws its
/// own generator from (seed, position), so output is identical for any
/// thread count or partition of the index space.
std::vector<TokenObservation> sample_stream(const SyntheticProfile& profile);

/// Writes a stream as line-delimited token observations, one JSON document
/// per line — the same shape the backend parser emits.
void write_stream(const std::vector<TokenObservation>& stream, const std::filesystem::path& path);

std::vector<TokenObservation> read_stream(const std::filesystem::path& path);

SyntheticProfile profile_from_file(const std::filesystem::path& path);

}  // namespace uloop::simulator
