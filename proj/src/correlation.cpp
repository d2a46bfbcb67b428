#include "softsrocc/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "softsrocc/errors.hpp"

namespace softsrocc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LabelConflict: return "LabelConflict";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
  }
  return "Unknown";
}

namespace detail {

void require_finite(std::span<const double> x, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw Error(ErrorCode::NonFinite,
                  std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "length mismatch: " + std::to_string(a.size()) +
                                               " vs " + std::to_string(b.size()));
  }
}

}  // namespace detail

namespace {

void require_pairable(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a, b);
  if (a.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "correlation needs at least 2 samples");
  }
  detail::require_finite(a, "first vector");
  detail::require_finite(b, "second vector");
}

double centered_pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "constant vector has zero variance");
  }
  return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

}  // namespace

double plcc(std::span<const double> a, std::span<const double> b) {
  require_pairable(a, b);
  return centered_pearson(a, b);
}

RankVector hard_rank(std::span<const double> x) {
  detail::require_finite(x, "hard_rank");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });

  // A tie block occupying sorted positions [lo, hi) has lo elements below it
  // and hi - lo equal elements (self included), each worth 1/2.
  RankVector ranks(n);
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo + 1;
    while (hi < n && x[order[hi]] == x[order[lo]]) ++hi;
    const double r = static_cast<double>(lo) + 0.5 * static_cast<double>(hi - lo);
    for (std::size_t p = lo; p < hi; ++p) ranks[order[p]] = r;
    lo = hi;
  }
  return ranks;
}

double srocc(std::span<const double> q, std::span<const double> qhat) {
  require_pairable(q, qhat);
  const RankVector rq = hard_rank(q);
  const RankVector rp = hard_rank(qhat);
  return centered_pearson(rq, rp);
}

double srocc_closed_form(std::span<const double> q, std::span<const double> qhat) {
  require_pairable(q, qhat);
  auto has_tie = [](std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) != s.end();
  };
  if (has_tie(q) || has_tie(qhat)) {
    throw Error(ErrorCode::InvalidArgument, "closed-form SROCC requires tie-free input");
  }
  const RankVector rq = hard_rank(q);
  const RankVector rp = hard_rank(qhat);
  double d2 = 0.0;
  for (std::size_t i = 0; i < rq.size(); ++i) {
    const double d = rq[i] - rp[i];
    d2 += d * d;
  }
  const double n = static_cast<double>(q.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace softsrocc
