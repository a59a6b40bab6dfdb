#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tame {

// All stochastic code takes an explicit engine; nothing reads global state.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent sub-stream seed for (base, a, b). Used to give every rollout its
// own stream so parallel collection merges deterministically.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng, double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(rng);
}

inline bool bernoulli(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace tame
