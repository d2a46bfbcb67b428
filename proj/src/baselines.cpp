#include "softsrocc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "softsrocc/errors.hpp"

namespace softsrocc {

LossResult margin_rank_loss(const GradTaggedScores& qhat,
                            std::span<const double> q,
                            MarginSign sign) {
  qhat.validate();
  detail::require_same_length(qhat.values, q);
  detail::require_finite(q, "ground truth");
  if (q.empty()) {
    throw Error(ErrorCode::InvalidArgument, "margin_rank_loss needs at least 1 sample");
  }
  const std::size_t n = q.size();
  const std::span<const double> p = qhat.values;

  LossResult out;
  out.grad.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;  // identically zero
      double term = 0.0;
      double dterm_dpi = 0.0;  // d term / d qhat_i; d term / d qhat_j is its negative
      if (sign == MarginSign::Predicted) {
        // |p_i - p_j| = e (p_i - p_j) with e from the predicted order.
        const double e = p[i] >= p[j] ? 1.0 : -1.0;
        term = std::abs(p[i] - p[j]) - e * (q[i] - q[j]);
        dterm_dpi = e;
      } else {
        const double e = q[i] >= q[j] ? 1.0 : -1.0;
        term = std::abs(q[i] - q[j]) - e * (p[i] - p[j]);
        dterm_dpi = -e;
      }
      if (term > 0.0) {
        total += term;
        out.grad[i] += dterm_dpi;
        out.grad[j] -= dterm_dpi;
      }
    }
  }
  out.loss = total;
  for (std::size_t i = 0; i < n; ++i) {
    if (!qhat.grad_mask[i]) out.grad[i] = 0.0;
  }
  return out;
}

std::uint64_t margin_loss_cost(std::uint64_t n) { return n * n; }

void ProjectionConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidConfig, "beta must be positive and finite");
  }
}

std::vector<double> isotonic_decreasing(std::span<const double> y) {
  // Pool adjacent violators over a stack of blocks (sum, count). A new value
  // is merged backwards while it exceeds the mean of the block before it.
  struct Block {
    double sum;
    double count;
    double mean() const { return sum / count; }
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (double v : y) {
    Block cur{v, 1.0};
    while (!blocks.empty() && blocks.back().mean() <= cur.mean()) {
      cur.sum += blocks.back().sum;
      cur.count += blocks.back().count;
      blocks.pop_back();
    }
    blocks.push_back(cur);
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) {
    out.insert(out.end(), static_cast<std::size_t>(b.count), b.mean());
  }
  return out;
}

RankVector permutahedron_project(std::span<const double> x, const ProjectionConfig& cfg) {
  cfg.validate();
  detail::require_finite(x, "permutahedron_project");
  const std::size_t n = x.size();
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "permutahedron_project needs at least 1 value");
  }

  // Project w = -x / beta onto conv{permutations of (n, ..., 1)}: with w
  // sorted descending, z_sorted = w_sorted - v where v is the non-increasing
  // isotonic fit of w_sorted - (n, n-1, ..., 1).
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = -x[i] / cfg.beta;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });

  std::vector<double> y(n);
  for (std::size_t p = 0; p < n; ++p) {
    y[p] = w[order[p]] - static_cast<double>(n - p);
  }
  const std::vector<double> v = isotonic_decreasing(y);

  RankVector z(n);
  for (std::size_t p = 0; p < n; ++p) z[order[p]] = w[order[p]] - v[p];
  return z;
}

}  // namespace softsrocc
