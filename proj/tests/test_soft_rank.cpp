#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "softsrocc/correlation.hpp"
#include "softsrocc/soft_rank.hpp"
#include "test_util.hpp"

using namespace softsrocc;
using softsrocc::testing::code_of;
using Vec = std::vector<double>;

namespace {

double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double rel_err(const Vec& analytic, const Vec& numeric) {
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3 * scale});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / d);
  }
  return worst;
}

}  // namespace

TEST_CASE("soft_rank hand cases") {
  CHECK(max_abs_diff(soft_rank(Vec{0.3, 0.1, 0.2}, {1000.0}), hard_rank(Vec{0.3, 0.1, 0.2})) < 1e-6);
  CHECK(max_abs_diff(soft_rank(Vec{1, 2, 3}, {1e-9}), Vec{1.5, 1.5, 1.5}) < 1e-6);
  for (double k : {0.01, 1.0, 1e4}) {
    CHECK(soft_rank(Vec{-42.0}, {k}) == Vec{0.5});
  }
}

TEST_CASE("soft_rank matches the term-by-term definition") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vec x = oracle::uniform(rng, 1 + t % 25, -2.0, 2.0);
    const double k = std::pow(10.0, -1.0 + 0.04 * t);
    CHECK(max_abs_diff(soft_rank(x, {k}), oracle::naive_soft_rank(x, k)) < 1e-12 * x.size());
  }
}

TEST_CASE("soft_rank config and input validation") {
  CHECK(code_of([] { soft_rank(Vec{1, 2}, {0.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { soft_rank(Vec{1, 2}, {-1.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { soft_rank(Vec{1, 2}, {1.0, 0.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { soft_rank(Vec{1, NAN}, {1.0}); }) == ErrorCode::NonFinite);
  CHECK(code_of([] { soft_rank_jacobian(Vec{INFINITY}, {1.0}); }) == ErrorCode::NonFinite);
}

TEST_CASE("soft_rank invariants: translation, scale/steepness duality, rank sum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> shift(-5.0, 5.0), alpha(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 40;
    const Vec x = oracle::uniform(rng, n);
    const double k = std::pow(10.0, t % 4);
    const Vec r = soft_rank(x, {k});

    double sum = 0.0;
    for (double v : r) sum += v;
    CHECK(std::abs(sum - 0.5 * n * n) <= 1e-9 * n * n);

    Vec shifted = x;
    const double c = shift(rng);
    for (auto& v : shifted) v += c;
    CHECK(max_abs_diff(soft_rank(shifted, {k}), r) < 1e-9);

    const double a = alpha(rng);
    Vec scaled = x;
    for (auto& v : scaled) v *= a;
    CHECK(max_abs_diff(soft_rank(scaled, {k}), soft_rank(x, {a * k})) < 1e-9);
  }
}

TEST_CASE("soft_rank converges to hard_rank for well separated values") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {2, 5, 16, 64}) {
    for (int t = 0; t < 10; ++t) {
      const Vec x = oracle::spaced(rng, n, 0.1);
      CHECK(max_abs_diff(soft_rank(x, {1000.0}), hard_rank(x)) < 1e-6);
    }
  }
}

TEST_CASE("soft_rank_jacobian hand cases") {
  const SquareMatrix j = soft_rank_jacobian(Vec{0, 0}, {1.0});
  CHECK(j.data == Vec{0.5, -0.5, -0.5, 0.5});
  CHECK(soft_rank_jacobian(Vec{3.0}, {5.0}).data == Vec{0.0});
}

TEST_CASE("soft_rank_jacobian is symmetric with zero row sums and matches finite differences") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 5;
    const Vec x = oracle::uniform(rng, n);
    const SoftRankConfig cfg{10.0};
    const SquareMatrix j = soft_rank_jacobian(x, cfg);
    Vec analytic, numeric;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        row += j(i, c);
        CHECK(j(i, c) == j(c, i));
      }
      CHECK(std::abs(row) < 1e-12);
      const Vec fd = oracle::finite_difference(
          [&](const Vec& v) { return oracle::naive_soft_rank(v, cfg.steepness)[i]; }, x, 1e-5);
      for (std::size_t c = 0; c < n; ++c) {
        analytic.push_back(j(i, c));
        numeric.push_back(fd[c]);
      }
    }
    CHECK(rel_err(analytic, numeric) < 1e-6);
  }
}

TEST_CASE("mono_loss hand cases") {
  std::mt19937_64 rng(23);
  const Vec q = oracle::spaced(rng, 10, 0.1);
  Vec up = q, down(q.size());
  for (auto& v : up) v = 2.0 * v + 3.0;
  const LossResult same = mono_loss(GradTaggedScores::all_live(up), q, {100.0});
  CHECK(same.loss == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_FALSE(same.degenerate);
  // Mirror image: strictly decreasing map of q.
  for (std::size_t i = 0; i < q.size(); ++i) down[i] = -q[i];
  CHECK(mono_loss(GradTaggedScores::all_live(down), q, {100.0}).loss ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mono_loss gradient matches finite differences on masked coordinates") {
  std::mt19937_64 rng(29);
  std::bernoulli_distribution coin(0.6);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 8;
    const SoftRankConfig cfg{5.0};
    GradTaggedScores qhat = GradTaggedScores::all_live(oracle::uniform(rng, n));
    for (auto& m : qhat.grad_mask) m = coin(rng);
    qhat.grad_mask[0] = 1;
    const Vec q = oracle::uniform(rng, n);
    const LossResult r = mono_loss(qhat, q, cfg);

    // Independent route: PLCC of term-by-term soft ranks.
    const Vec rq = oracle::naive_soft_rank(q, cfg.steepness);
    auto f = [&](const Vec& v) { return -oracle::plcc_mp(rq, oracle::naive_soft_rank(v, cfg.steepness)); };
    CHECK(r.loss == doctest::Approx(f(qhat.values)).epsilon(1e-12));
    Vec fd = oracle::finite_difference(f, qhat.values, 1e-5);
    for (std::size_t i = 0; i < n; ++i) {
      if (!qhat.grad_mask[i]) {
        CHECK(r.grad[i] == 0.0);
        fd[i] = 0.0;
      }
    }
    CHECK(rel_err(r.grad, fd) < 1e-5);
    CHECK(r.loss >= -1.0);
    CHECK(r.loss <= 1.0);
  }
}

TEST_CASE("mono_loss is translation invariant") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const Vec q = oracle::uniform(rng, 12);
    Vec p = oracle::uniform(rng, 12);
    const double base = mono_loss(GradTaggedScores::all_live(p), q, {10.0}).loss;
    Vec q2 = q;
    for (auto& v : q2) v += 1.5;
    for (auto& v : p) v -= 0.75;
    CHECK(mono_loss(GradTaggedScores::all_live(p), q2, {10.0}).loss ==
          doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("mono_loss agrees with exact SROCC at high steepness") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 50; ++t) {
    const Vec q = oracle::spaced(rng, 3 + t % 20, 0.1);
    const Vec p = oracle::spaced(rng, q.size(), 0.1);
    CHECK(std::abs(-mono_loss(GradTaggedScores::all_live(p), q, {1000.0}).loss - srocc(q, p)) < 1e-4);
  }
}

TEST_CASE("mono_loss degenerate input yields zero loss and gradient") {
  const LossResult flat = mono_loss(GradTaggedScores::all_live(Vec{0.5, 0.5, 0.5}), Vec{1, 2, 3}, {});
  CHECK(flat.degenerate);
  CHECK(flat.loss == 0.0);
  CHECK(flat.grad == Vec{0, 0, 0});
  const LossResult flat_q = mono_loss(GradTaggedScores::all_live(Vec{1, 2, 3}), Vec{4, 4, 4}, {});
  CHECK(flat_q.degenerate);
}

TEST_CASE("mono_loss errors") {
  CHECK(code_of([] { mono_loss(GradTaggedScores::all_live(Vec{1}), Vec{1}, {}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { mono_loss(GradTaggedScores::all_live(Vec{1, 2}), Vec{1, 2, 3}, {}); }) ==
        ErrorCode::LengthMismatch);
  CHECK(code_of([] {
          GradTaggedScores s{Vec{1, 2}, {1}};
          mono_loss(s, Vec{1, 2}, {});
        }) == ErrorCode::LengthMismatch);
}

TEST_CASE("cost model") {
  CHECK(mono_loss_cost(1) == 1);
  CHECK(mono_loss_cost(100) == 10000);
}
