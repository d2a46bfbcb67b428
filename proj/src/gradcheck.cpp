#include "softsrocc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "softsrocc/errors.hpp"
#include "softsrocc/soft_rank.hpp"
#include "softsrocc/train.hpp"

namespace softsrocc {

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) {
    throw Error(ErrorCode::LengthMismatch, "gradient vectors differ in length");
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  if (scale == 0.0) return 0.0;
  const double floor = 1e-3 * scale;
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

double gradcheck_threshold(double steepness) { return steepness >= 1000.0 ? 1e-4 : 1e-5; }

double gradcheck_step(double steepness) { return 1e-5 * std::min(1.0, 10.0 / steepness); }

namespace {

constexpr double kObjectiveThreshold = 1e-4;

void record(GradcheckSuite& suite, std::size_t trial, double err) {
  ++suite.trials;
  if (err > suite.worst_error || !std::isfinite(err)) {
    suite.worst_error = std::isfinite(err) ? err : INFINITY;
    suite.worst_trial = trial;
  }
  suite.pass = suite.pass && std::isfinite(err) && err < suite.threshold;
}

std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  if (opts.n < 3) throw Error(ErrorCode::InvalidConfig, "gradcheck needs n >= 3");
  const SoftRankConfig cfg{opts.steepness, 1e-12};
  cfg.validate();
  const double step = gradcheck_step(opts.steepness);

  GradcheckReport report;
  report.vacuous = opts.trials == 0;
  GradcheckSuite jac_suite{"soft_rank_jacobian", 0, 0.0, 0, gradcheck_threshold(opts.steepness), true};
  GradcheckSuite loss_suite{"mono_loss", 0, 0.0, 0, gradcheck_threshold(opts.steepness), true};
  GradcheckSuite obj_suite{"train_objective", 0, 0.0, 0, kObjectiveThreshold, true};

  std::mt19937_64 rng(opts.seed);
  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    const std::vector<double> x = uniform_vector(rng, opts.n);
    const std::vector<double> q = uniform_vector(rng, opts.n);

    // Jacobian, column by column.
    const SquareMatrix jac = soft_rank_jacobian(x, cfg);
    std::vector<double> analytic, numeric;
    for (std::size_t i = 0; i < opts.n; ++i) {
      auto rank_i = [&](std::span<const double> v) { return soft_rank(v, cfg)[i]; };
      const auto row = central_difference(rank_i, x, step);
      for (std::size_t j = 0; j < opts.n; ++j) {
        analytic.push_back(jac(i, j));
        numeric.push_back(row[j]);
      }
    }
    record(jac_suite, trial, max_relative_error(analytic, numeric));

    // Loss gradient with a random mask; at least one element stays live.
    GradTaggedScores qhat = GradTaggedScores::all_live(x);
    std::bernoulli_distribution coin(0.7);
    for (auto& m : qhat.grad_mask) m = coin(rng) ? 1 : 0;
    qhat.grad_mask[trial % opts.n] = 1;
    const LossResult res = mono_loss(qhat, q, cfg);
    auto loss_at = [&](std::span<const double> v) {
      GradTaggedScores probe{std::vector<double>(v.begin(), v.end()), qhat.grad_mask};
      return mono_loss(probe, q, cfg).loss;
    };
    std::vector<double> fd = central_difference(loss_at, x, step);
    for (std::size_t i = 0; i < opts.n; ++i) {
      if (!qhat.grad_mask[i]) fd[i] = 0.0;
    }
    record(loss_suite, trial, max_relative_error(res.grad, fd));

    // Composite training objective w.r.t. the predictor parameters.
    SyntheticSpec spec;
    spec.seed = opts.seed * 1000 + trial;
    spec.n = std::max<std::size_t>(2 * opts.n + 8, 10);
    spec.dim = 3;
    const SyntheticDataset data = gen_synthetic(spec);
    std::vector<std::size_t> rows(opts.n);
    for (std::size_t i = 0; i < opts.n; ++i) rows[i] = i;

    TrainConfig tc;
    tc.soft = cfg;
    tc.hidden = 4;
    tc.batch_size = opts.n;
    tc.seed = spec.seed;
    Predictor model(spec.dim, tc.hidden, tc.seed);

    MemoryBank bank(1);
    std::vector<std::size_t> others;
    for (std::size_t i = opts.n / 2; i < data.size(); ++i) others.push_back(i);
    std::vector<double> stale = model.predict(data, others);
    std::normal_distribution<double> jitter(0.0, 0.05);
    for (double& p : stale) p += jitter(rng);
    std::vector<std::string> other_ids;
    std::vector<double> other_mos;
    for (std::size_t i : others) {
      other_ids.push_back(data.ids[i]);
      other_mos.push_back(data.mos[i]);
    }
    bank.update(other_ids, stale, other_mos, 0);

    double worst = 0.0;
    for (LossMode mode : {LossMode::MseOnly, LossMode::MsePlusMono, LossMode::MsePlusMonoBank}) {
      tc.mode = mode;
      const ObjectiveValue obj = composite_objective(model, data, rows, tc, &bank);
      Predictor probe = model;
      auto objective_at = [&](std::span<const double> theta) {
        std::copy(theta.begin(), theta.end(), probe.params().begin());
        return composite_objective(probe, data, rows, tc, &bank).loss;
      };
      const std::vector<double> theta(model.params().begin(), model.params().end());
      const auto fd_theta = central_difference(objective_at, theta, step);
      worst = std::max(worst, max_relative_error(obj.param_grad, fd_theta));
    }
    record(obj_suite, trial, worst);
  }

  report.suites = {jac_suite, loss_suite, obj_suite};
  for (const auto& s : report.suites) report.pass = report.pass && s.pass;
  return report;
}

}  // namespace softsrocc
