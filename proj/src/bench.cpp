#include "softsrocc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "softsrocc/baselines.hpp"
#include "softsrocc/errors.hpp"
#include "softsrocc/soft_rank.hpp"

namespace softsrocc {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least 2 points to fit a slope");
  }
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

template <typename Fn>
double median_ns(std::size_t reps, Fn&& fn) {
  std::vector<double> t(reps);
  for (auto& v : t) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    v = std::chrono::duration<double, std::nano>(stop - start).count();
  }
  std::sort(t.begin(), t.end());
  return reps % 2 ? t[reps / 2] : 0.5 * (t[reps / 2 - 1] + t[reps / 2]);
}

}  // namespace

BenchReport run_bench(std::span<const std::size_t> sizes, std::size_t reps, std::uint64_t seed) {
  if (sizes.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least 2 sizes to fit a slope");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "sizes must be >= 2 and strictly increasing");
    }
  }
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");

  BenchReport report;
  report.reps = reps;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SoftRankConfig cfg{};
  volatile double sink = 0.0;

  for (std::size_t n : sizes) {
    std::vector<double> q(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = u(rng);
      p[i] = q[i] + 0.1 * u(rng);
    }
    const GradTaggedScores qhat = GradTaggedScores::all_live(p);

    BenchRecord rec;
    rec.n = n;
    rec.wall_ns_mono = median_ns(reps, [&] { sink = sink + mono_loss(qhat, q, cfg).grad[0]; });
    rec.wall_ns_margin =
        median_ns(reps, [&] { sink = sink + margin_rank_loss(qhat, q).grad[0]; });
    rec.pair_count_mono = mono_loss_cost(n);
    rec.pair_count_margin = margin_loss_cost(n);
    report.records.push_back(rec);
  }

  std::vector<double> xs, ym, yr;
  for (const auto& r : report.records) {
    xs.push_back(static_cast<double>(r.n));
    ym.push_back(r.wall_ns_mono);
    yr.push_back(r.wall_ns_margin);
  }
  report.slope_mono = loglog_slope(xs, ym);
  report.slope_margin = loglog_slope(xs, yr);
  return report;
}

}  // namespace softsrocc
