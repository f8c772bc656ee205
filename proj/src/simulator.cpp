#include "uloop/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "uloop/json_codec.hpp"

namespace uloop::simulator {

namespace {

double mixture_entropy(double lambda, int k) {
  // p0 = 1 - lambda + lambda/k, the rest share lambda/k each.
  const double p0 = 1.0 - lambda + lambda / k;
  const double rest = lambda / k;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log(p0);
  if (rest > 0.0) h -= (k - 1) * rest * std::log(rest);
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

void SyntheticProfile::validate() const {
  if (components.empty()) {
    throw std::invalid_argument("profile: needs at least one component");
  }
  if (top_k < 1 || top_k > 20) {
    throw std::invalid_argument("profile: top_k must be in 1..20");
  }
  if (min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("profile: invalid length range");
  }
  const double max_h = std::log(static_cast<double>(top_k));
  double weight_sum = 0.0;
  for (const auto& component : components) {
    if (component.weight < 0.0) {
      throw std::invalid_argument("profile: weights must be non-negative");
    }
    if (component.target_entropy < 0.0 || component.target_entropy > max_h) {
      throw std::invalid_argument("profile: target entropy outside [0, ln k]");
    }
    if (component.spread < 0.0) {
      throw std::invalid_argument("profile: spread must be non-negative");
    }
    weight_sum += component.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("profile: weights must sum to 1");
  }
}

SyntheticProfile bimodal_profile(std::size_t length, std::uint64_t seed) {
  SyntheticProfile profile;
  profile.components = {{0.71, 0.2, 0.15}, {0.11, 0.75, 0.20}, {0.18, 1.3, 0.25}};
  profile.min_length = length;
  profile.max_length = length;
  profile.top_k = 5;
  profile.seed = seed;
  return profile;
}

std::vector<double> entropy_to_distribution(double target_entropy, int k) {
  if (k < 1) {
    throw std::invalid_argument("entropy_to_distribution: k must be >= 1");
  }
  const double max_h = std::log(static_cast<double>(k));
  if (target_entropy < 0.0 || target_entropy > max_h) {
    throw std::invalid_argument("entropy_to_distribution: target outside [0, ln k]");
  }

  double lo = 0.0, hi = 1.0;
  if (k == 1 || target_entropy == 0.0) {
    hi = 0.0;
  } else if (target_entropy >= max_h) {
    lo = 1.0;
  } else {
    // 1e-6 nat tolerance; ~60 halvings take the bracket well below it.
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
      const double mid = (lo + hi) / 2.0;
      if (mixture_entropy(mid, k) < target_entropy) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  const double lambda = (lo + hi) / 2.0;

  std::vector<double> p(static_cast<std::size_t>(k), lambda / k);
  p[0] = 1.0 - lambda + lambda / k;
  return p;
}

std::vector<TokenObservation> sample_stream(const SyntheticProfile& profile) {
  profile.validate();

  std::size_t length = profile.min_length;
  if (profile.max_length > profile.min_length) {
    std::mt19937_64 rng(splitmix64(profile.seed ^ 0x6c656e677468ull));  // length draw
    length = std::uniform_int_distribution<std::size_t>(profile.min_length,
                                                        profile.max_length)(rng);
  }

  std::vector<double> cumulative;
  cumulative.reserve(profile.components.size());
  double acc = 0.0;
  for (const auto& component : profile.components) {
    acc += component.weight;
    cumulative.push_back(acc);
  }

  const double max_h = std::log(static_cast<double>(profile.top_k));
  std::vector<TokenObservation> stream(length);

  const auto n = static_cast<std::ptrdiff_t>(length);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto pos = static_cast<std::size_t>(i);
    std::mt19937_64 rng(splitmix64(profile.seed ^ (0x9e3779b97f4a7c15ull * (pos + 1))));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double u = unit(rng);
    std::size_t c = cumulative.size() - 1;
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
      if (u < cumulative[j]) {
        c = j;
        break;
      }
    }
    const auto& component = profile.components[c];
    double target = component.target_entropy;
    if (component.spread > 0.0) {
      target += (unit(rng) * 2.0 - 1.0) * component.spread;
      target = std::clamp(target, 0.0, max_h);
    }

    const auto p = entropy_to_distribution(target, profile.top_k);

    TokenObservation token;
    token.position = pos;
    token.text = "t" + std::to_string(pos);
    token.logprob = std::log(p[0]);
    token.alternatives.reserve(p.size());
    token.alternatives.push_back({token.text, token.logprob});
    for (std::size_t j = 1; j < p.size(); ++j) {
      token.alternatives.push_back(
          {"t" + std::to_string(pos) + "~" + std::to_string(j), std::log(p[j])});
    }
    stream[pos] = std::move(token);
  }
  return stream;
}

void write_stream(const std::vector<TokenObservation>& stream,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("simulator: cannot open " + path.string() + " for writing");
  }
  for (const auto& token : stream) {
    out << nlohmann::json(token).dump() << "\n";
  }
}

std::vector<TokenObservation> read_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("simulator: cannot open " + path.string());
  }
  std::vector<TokenObservation> stream;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    stream.push_back(nlohmann::json::parse(line).get<TokenObservation>());
  }
  return stream;
}

SyntheticProfile profile_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("simulator: cannot open profile " + path.string());
  }
  nlohmann::json doc;
  in >> doc;

  SyntheticProfile profile;
  for (const auto& item : doc.at("components")) {
    profile.components.push_back({item.at("weight").get<double>(),
                                  item.at("target_entropy").get<double>(),
                                  item.value("spread", 0.0)});
  }
  if (doc.contains("length")) {
    profile.min_length = profile.max_length = doc.at("length").get<std::size_t>();
  } else {
    profile.min_length = doc.at("min_length").get<std::size_t>();
    profile.max_length = doc.at("max_length").get<std::size_t>();
  }
  profile.top_k = doc.value("top_k", 5);
  profile.seed = doc.value("seed", 0ull);
  profile.validate();
  return profile;
}

}  // namespace uloop::simulator
