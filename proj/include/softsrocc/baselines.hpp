#pragma once

// Comparison baselines: the pairwise margin ranking loss and the soft sort
// obtained by Euclidean projection onto the permutahedron.

#include <cstdint>
#include <span>
#include <vector>

#include "softsrocc/correlation.hpp"
#include "softsrocc/soft_rank.hpp"

namespace softsrocc {

enum class MarginSign {
  // e(i, j) = +1 if qhat_i >= qhat_j else -1, applied as
  // max(0, |qhat_i - qhat_j| - e (q_i - q_j)). Default.
  Predicted,
  // e(i, j) = +1 if q_i >= q_j else -1, applied as
  // max(0, |q_i - q_j| - e (qhat_i - qhat_j)).
  GroundTruth,
};

/// Sum over all ordered pairs (i, j) of the hinge above. Returns a
/// subgradient for masked-in predictions: 0 at the hinge kink, and the sign
/// e = +1 branch when the compared values are equal.
LossResult margin_rank_loss(const GradTaggedScores& qhat,
                            std::span<const double> q,
                            MarginSign sign = MarginSign::Predicted);

/// Ordered-pair evaluations of margin_rank_loss: n^2.
std::uint64_t margin_loss_cost(std::uint64_t n);

struct ProjectionConfig {
  double beta = 1.0;

  void validate() const;
};

/// argmin over z in the permutahedron of (1..n) of 0.5 ||z + x / beta||^2,
/// i.e. the projection of -x / beta. Smallest x receives the largest value.
/// Solved by sorting and pool-adjacent-violators, O(n log n).
RankVector permutahedron_project(std::span<const double> x, const ProjectionConfig& cfg);

/// Least-squares non-increasing fit: argmin_{v_1 >= ... >= v_n} 0.5 ||v - y||^2.
std::vector<double> isotonic_decreasing(std::span<const double> y);

}  // namespace softsrocc
