#pragma once

// Wall-clock scaling of mono_loss against margin_rank_loss.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace softsrocc {

struct BenchRecord {
  std::size_t n = 0;
  double wall_ns_mono = 0.0;    // median over repetitions
  double wall_ns_margin = 0.0;  // median over repetitions
  std::uint64_t pair_count_mono = 0;
  std::uint64_t pair_count_margin = 0;
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::size_t reps = 0;
  double slope_mono = 0.0;
  double slope_margin = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Times forward + gradient of both losses on random inputs of each size.
/// Requires at least two strictly increasing sizes and reps >= 1.
BenchReport run_bench(std::span<const std::size_t> sizes, std::size_t reps, std::uint64_t seed);

}  // namespace softsrocc
