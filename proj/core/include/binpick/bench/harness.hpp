#pragma once

#include <cstdint>
#include <vector>

#include "binpick/bench/config.hpp"
#include "binpick/bench/report.hpp"

namespace binpick::bench {

/// Per-episode seed from the master seed (SplitMix64 derivation).
std::uint64_t episode_seed(std::uint64_t master, std::size_t episode);

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  std::size_t remaining = 0;  // objects left in the bin
  bool emptied = false;
  bool exhausted = false;  // retry budget ran out with objects left
};

/// Generates a bin and picks until it is empty or the retry budget is spent.
/// Recoverable failures become records; nothing is thrown after the scene is
/// generated.
EpisodeResult run_episode(const BenchmarkConfig& config, const BenchAssets& assets,
                          std::uint64_t seed, std::size_t episode = 0);
EpisodeResult run_episode(const BenchmarkConfig& config, std::uint64_t seed);

struct BenchmarkResult {
  std::vector<EpisodeResult> episodes;
  Report report;
};

/// Runs every episode (in parallel when threads allow) and folds the records
/// in episode order.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace binpick::bench
