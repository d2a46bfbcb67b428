#include "softsrocc/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "softsrocc/errors.hpp"
#include "softsrocc/score_file.hpp"

namespace softsrocc {

namespace {

constexpr LossMode kModes[] = {LossMode::MseOnly, LossMode::MsePlusMono,
                               LossMode::MsePlusMonoBank};

std::vector<AblationRun> run_seed(const AblationConfig& cfg, std::uint64_t seed) {
  SyntheticSpec spec = cfg.data;
  spec.seed = seed;
  const SyntheticDataset data = gen_synthetic(spec);
  std::vector<AblationRun> runs;
  for (LossMode mode : kModes) {
    TrainConfig tc = cfg.train;
    tc.mode = mode;
    tc.seed = seed;
    AblationRun run;
    run.mode = mode;
    run.seed = seed;
    try {
      const TrainResult res = train(data, tc);
      run.test_plcc = res.history.back().test_plcc;
      run.test_srocc = res.history.back().test_srocc;
      run.train_loss = res.history.back().train_loss;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DivergenceDetected) throw;
      run.diverged = true;
      run.error = e.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

// Test SROCC of converged runs in `mode` and `other`, paired by seed.
std::pair<std::vector<double>, std::vector<double>> paired_srocc(
    const std::vector<AblationRun>& runs, LossMode treatment, LossMode control) {
  std::vector<double> t, c;
  for (const auto& a : runs) {
    if (a.mode != treatment || a.diverged) continue;
    for (const auto& b : runs) {
      if (b.mode == control && b.seed == a.seed && !b.diverged) {
        t.push_back(a.test_srocc);
        c.push_back(b.test_srocc);
      }
    }
  }
  return {t, c};
}

}  // namespace

PairedTest paired_one_sided_test(const std::vector<double>& treatment,
                                 const std::vector<double>& control) {
  if (treatment.size() != control.size()) {
    throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  }
  PairedTest out;
  out.pairs = treatment.size();
  if (out.pairs < 2) return out;
  std::vector<double> diff(out.pairs);
  for (std::size_t i = 0; i < out.pairs; ++i) diff[i] = treatment[i] - control[i];
  const auto [mean, sd] = mean_std(diff);
  out.mean_diff = mean;
  if (sd == 0.0) {
    out.t_stat = mean > 0.0 ? INFINITY : (mean < 0.0 ? -INFINITY : 0.0);
    out.p_value = mean > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.t_stat = mean / (sd / std::sqrt(static_cast<double>(out.pairs)));
  const boost::math::students_t dist(static_cast<double>(out.pairs - 1));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t_stat));
  return out;
}

AblationReport run_ablation(const AblationConfig& cfg) {
  cfg.validate();
  AblationReport report;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        auto runs = run_seed(cfg, cfg.seeds[i]);
        std::lock_guard lock(mu);
        for (auto& r : runs) report.runs.push_back(std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.threads, cfg.seeds.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(report.runs.begin(), report.runs.end(), [](const auto& a, const auto& b) {
    return std::pair(static_cast<int>(a.mode), a.seed) < std::pair(static_cast<int>(b.mode), b.seed);
  });

  for (LossMode mode : kModes) {
    std::vector<double> pl, sr;
    for (const auto& r : report.runs) {
      if (r.mode == mode && !r.diverged) {
        pl.push_back(r.test_plcc);
        sr.push_back(r.test_srocc);
      }
    }
    ModeSummary s;
    s.mode = mode;
    s.runs = sr.size();
    std::tie(s.mean_plcc, s.std_plcc) = mean_std(pl);
    std::tie(s.mean_srocc, s.std_srocc) = mean_std(sr);
    report.summaries.push_back(s);
  }
  {
    const auto [t, c] = paired_srocc(report.runs, LossMode::MsePlusMonoBank, LossMode::MseOnly);
    report.bank_vs_mse = paired_one_sided_test(t, c);
  }
  {
    const auto [t, c] = paired_srocc(report.runs, LossMode::MsePlusMono, LossMode::MseOnly);
    report.mono_vs_mse = paired_one_sided_test(t, c);
  }
  return report;
}

void write_ablation_csv(std::ostream& out, const AblationReport& report) {
  out << "kind,mode,seed,status,test_plcc,test_srocc,train_loss,plcc_std,srocc_std\n";
  for (const auto& r : report.runs) {
    out << "run," << to_string(r.mode) << ',' << r.seed << ','
        << (r.diverged ? "diverged" : "ok") << ',';
    if (r.diverged) {
      out << ",,,,\n";
    } else {
      out << format_double(r.test_plcc) << ',' << format_double(r.test_srocc) << ','
          << format_double(r.train_loss) << ",,\n";
    }
  }
  for (const auto& s : report.summaries) {
    out << "summary," << to_string(s.mode) << ",,n=" << s.runs << ','
        << format_double(s.mean_plcc) << ',' << format_double(s.mean_srocc) << ",,"
        << format_double(s.std_plcc) << ',' << format_double(s.std_srocc) << '\n';
  }
}

}  // namespace softsrocc
