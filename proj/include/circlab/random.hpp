#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace circlab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent stream: mixes the master seed, a trial or cell
// index and a stream tag, so that results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                          std::uint64_t stream);

Rng make_rng(std::uint64_t master, std::uint64_t index = 0,
             std::uint64_t stream = 0);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer in [0, n), unbiased; n > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

// Uniform k-subset of {0, ..., n-1} by partial Fisher-Yates, returned sorted.
std::vector<int> sample_subset(int n, int k, Rng& rng);

}  // namespace circlab
