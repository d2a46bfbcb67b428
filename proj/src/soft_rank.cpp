#include "softsrocc/soft_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "softsrocc/errors.hpp"

namespace softsrocc {

void SoftRankConfig::validate() const {
  if (!(steepness > 0.0) || !std::isfinite(steepness)) {
    throw Error(ErrorCode::InvalidConfig, "steepness must be positive and finite");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidConfig, "eps must be positive and finite");
  }
}

GradTaggedScores GradTaggedScores::all_live(std::vector<double> values) {
  GradTaggedScores s;
  s.grad_mask.assign(values.size(), 1);
  s.values = std::move(values);
  return s;
}

void GradTaggedScores::validate() const {
  if (values.size() != grad_mask.size()) {
    throw Error(ErrorCode::LengthMismatch, "values and grad_mask differ in length");
  }
  detail::require_finite(values, "scores");
}

namespace {

// sech^2(z) = 4e / (1 + e)^2 with e = exp(-2|z|). Unlike 1 - tanh^2 this
// keeps full relative accuracy once tanh rounds to +-1 (|z| > ~19).
inline double sech2(double z) {
  const double e = std::exp(-2.0 * std::abs(z));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

RankVector soft_rank(std::span<const double> x, const SoftRankConfig& cfg) {
  cfg.validate();
  detail::require_finite(x, "soft_rank");
  const std::size_t n = x.size();
  // rank_i = n/2 + (1/2) sum_j tanh(k (x_i - x_j)); tanh is odd, so each
  // pair is evaluated once and enters with opposite signs.
  std::vector<double> tsum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = std::tanh(cfg.steepness * (x[i] - x[j]));
      tsum[i] += t;
      tsum[j] -= t;
    }
  }
  RankVector r(n);
  const double half_n = 0.5 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = half_n + 0.5 * tsum[i];
  return r;
}

SquareMatrix soft_rank_jacobian(std::span<const double> x, const SoftRankConfig& cfg) {
  cfg.validate();
  detail::require_finite(x, "soft_rank_jacobian");
  const std::size_t n = x.size();
  SquareMatrix jac(n);
  const double half_k = 0.5 * cfg.steepness;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = half_k * sech2(cfg.steepness * (x[i] - x[j]));
      jac(i, j) = -w;
      jac(j, i) = -w;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) diag -= jac(i, j);
    }
    jac(i, i) = diag;
  }
  return jac;
}

LossResult mono_loss(const GradTaggedScores& qhat,
                     std::span<const double> q,
                     const SoftRankConfig& cfg) {
  cfg.validate();
  qhat.validate();
  detail::require_same_length(qhat.values, q);
  detail::require_finite(q, "ground truth");
  const std::size_t n = q.size();
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "mono_loss needs at least 2 samples");
  }

  const RankVector rq = soft_rank(q, cfg);
  const std::span<const double> x = qhat.values;

  std::vector<double> tsum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = std::tanh(cfg.steepness * (x[i] - x[j]));
      tsum[i] += t;
      tsum[j] -= t;
    }
  }

  // Prediction soft ranks are n/2 + tsum/2, so the centered rank is tsum/2
  // up to the rounding left in sum(tsum), which is removed explicitly.
  std::vector<double> a(n), b(n);
  const double mean_q = std::accumulate(rq.begin(), rq.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rq[i] - mean_q;
    b[i] = 0.5 * tsum[i];
  }
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] -= mean_b;
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  const double norm_a = std::sqrt(saa);
  const double norm_b = std::sqrt(sbb);

  LossResult out;
  out.grad.assign(n, 0.0);
  if (norm_a < cfg.eps || norm_b < cfg.eps) {
    out.degenerate = true;
    return out;
  }
  const double rho = sab / (norm_a * norm_b);
  out.loss = -std::clamp(rho, -1.0, 1.0);

  // d(-rho)/d rank_m; centering drops out because a and b sum to zero.
  std::vector<double> g(n);
  for (std::size_t m = 0; m < n; ++m) {
    g[m] = -(a[m] / (norm_a * norm_b) - rho * b[m] / sbb);
  }

  // grad = J^T g = J g. Pair (i, j) with weight w = (k/2) sech^2 adds
  // w (g_i - g_j) to coordinate i and w (g_j - g_i) to coordinate j. The
  // tanh values are recomputed rather than stored, keeping memory O(n).
  const double half_k = 0.5 * cfg.steepness;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = half_k * sech2(cfg.steepness * (x[i] - x[j]));
      const double d = w * (g[i] - g[j]);
      out.grad[i] += d;
      out.grad[j] -= d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!qhat.grad_mask[i]) out.grad[i] = 0.0;
  }
  return out;
}

std::uint64_t mono_loss_cost(std::uint64_t n) { return n * n; }

}  // namespace softsrocc
