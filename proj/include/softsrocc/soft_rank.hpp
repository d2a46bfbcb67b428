#pragma once

// Differentiable monotonicity loss built on tanh-smoothed Heaviside ranks.
//
// Notation map: the steepness constant usually written k lives in
// SoftRankConfig::steepness; every summation index below is a plain loop
// index and never the steepness.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "softsrocc/correlation.hpp"

namespace softsrocc {

struct SoftRankConfig {
  double steepness = 10.0;  // tuned for scores normalized to [0, 1]
  double eps = 1e-12;       // guard on centered rank norms

  void validate() const;
};

/// Scores with a per-element flag marking live optimization variables.
/// Elements with grad_mask == false still take part in every soft rank but
/// are treated as constants.
struct GradTaggedScores {
  std::vector<double> values;
  std::vector<std::uint8_t> grad_mask;

  static GradTaggedScores all_live(std::vector<double> values);
  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  /// d loss / d value, one entry per input element; zero where grad_mask is
  /// false.
  std::vector<double> grad;
  /// True when a centered rank vector had norm below eps; loss and grad are
  /// then zero.
  bool degenerate = false;
};

/// Dense row-major n x n matrix.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// rank_i = sum_j (1 + tanh(k (x_i - x_j))) / 2 over all j, self term
/// included. Converges to hard_rank as k grows.
RankVector soft_rank(std::span<const double> x, const SoftRankConfig& cfg);

/// J(i, j) = d rank_i / d x_j. Off-diagonal entries are
/// -(k/2) sech^2(k (x_i - x_j)); the diagonal is minus the sum of the
/// off-diagonal row. The matrix is symmetric with zero row sums. Each pair is
/// evaluated once, in ascending (i, j) order, so results are deterministic.
SquareMatrix soft_rank_jacobian(std::span<const double> x, const SoftRankConfig& cfg);

/// Negated PLCC between the soft ranks of the ground truth and of the
/// predictions, with the exact analytic gradient for masked-in predictions.
///
/// The gradient chains d(-PLCC)/d(rank) through the soft-rank Jacobian
/// without materializing it: O(n^2) time, O(n) memory.
LossResult mono_loss(const GradTaggedScores& qhat,
                     std::span<const double> q,
                     const SoftRankConfig& cfg);

/// Pairwise tanh evaluations performed to build one full soft-rank vector of
/// length n. Counted as n^2, the size of the pair grid.
std::uint64_t mono_loss_cost(std::uint64_t n);

}  // namespace softsrocc
