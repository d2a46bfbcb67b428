#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "softsrocc/ablation.hpp"
#include "softsrocc/bench.hpp"
#include "softsrocc/correlation.hpp"
#include "softsrocc/errors.hpp"
#include "softsrocc/gradcheck.hpp"
#include "softsrocc/score_file.hpp"
#include "softsrocc/soft_rank.hpp"
#include "softsrocc/train.hpp"

namespace softsrocc::cli {

namespace {

using json = nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return kParseError;
    case ErrorCode::DegenerateVariance: return kDegenerateVariance;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument: return kInvalidConfig;
    default: return kFailure;
  }
}

int report_error(const Error& e, std::ostream& err) {
  err << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
  return exit_code_for(e.code());
}

json envelope(const std::string& command, json config, json results, double wall_seconds) {
  return json{{"command", command},
              {"config", std::move(config)},
              {"results", std::move(results)},
              {"wall_seconds", wall_seconds},
              {"version", SOFTSROCC_VERSION}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

AblationConfig load_config(const std::string& path, const KeyValues& overrides) {
  AblationConfig cfg = default_ablation_config();
  if (!path.empty()) apply_key_values(cfg, parse_key_values(path));
  apply_key_values(cfg, overrides);
  return cfg;
}

}  // namespace

int cmd_corr(const CorrOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ScoreFile file = read_score_file(opts.path);
    if (file.size() < 2) {
      throw Error(ErrorCode::ParseError, "need at least 2 data rows, got " +
                                             std::to_string(file.size()));
    }
    const double p = plcc(file.mos, file.pred);
    const double s = srocc(file.mos, file.pred);
    const SoftRankConfig cfg{opts.steepness, 1e-12};
    const LossResult mono = mono_loss(GradTaggedScores::all_live(file.pred), file.mos, cfg);
    if (mono.degenerate) {
      throw Error(ErrorCode::DegenerateVariance, "soft ranks have no spread at this steepness");
    }
    const double soft = -mono.loss;
    if (opts.format == Format::Json) {
      out << json{{"plcc", p}, {"srocc", s}, {"soft_srocc", soft}, {"n", file.size()},
                  {"k", opts.steepness}}.dump()
          << '\n';
    } else {
      out << "plcc,srocc,soft_srocc,n,k\n"
          << format_double(p) << ',' << format_double(s) << ',' << format_double(soft) << ','
          << file.size() << ',' << format_double(opts.steepness) << '\n';
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_gradcheck(const GradcheckCmdOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    const GradcheckReport report =
        run_gradcheck({opts.n, opts.steepness, opts.seed, opts.trials});
    if (report.vacuous) err << "warning: trials=0, nothing was checked\n";
    if (opts.format == Format::Json) {
      json suites = json::array();
      for (const auto& s : report.suites) {
        suites.push_back({{"name", s.name}, {"trials", s.trials}, {"worst_error", s.worst_error},
                          {"worst_trial", s.worst_trial}, {"threshold", s.threshold},
                          {"pass", s.pass}});
      }
      out << envelope("gradcheck",
                      {{"n", opts.n}, {"k", opts.steepness}, {"seed", opts.seed},
                       {"trials", opts.trials}},
                      {{"pass", report.pass}, {"vacuous", report.vacuous}, {"suites", suites}},
                      seconds_since(start))
                 .dump(2)
          << '\n';
    } else {
      for (const auto& s : report.suites) {
        out << (s.pass ? "PASS " : "FAIL ") << s.name << ": trials=" << s.trials
            << " worst_rel_error=" << s.worst_error << " (trial " << s.worst_trial
            << ") threshold=" << s.threshold << '\n';
      }
      out << (report.pass ? "gradcheck passed\n" : "gradcheck FAILED\n");
    }
    return report.pass ? kOk : kGradcheckFailed;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    const BenchReport report = run_bench(opts.sizes, opts.reps, opts.seed);
    const char* claim = "claimed complexity: mono_loss O(K), margin_rank_loss O(K^2)";
    if (opts.format == Format::Json) {
      json records = json::array();
      for (const auto& r : report.records) {
        records.push_back({{"n", r.n}, {"wall_ns_mono", r.wall_ns_mono},
                           {"wall_ns_margin", r.wall_ns_margin},
                           {"pair_count_mono", r.pair_count_mono},
                           {"pair_count_margin", r.pair_count_margin}});
      }
      out << envelope("bench", {{"sizes", opts.sizes}, {"reps", opts.reps}, {"seed", opts.seed}},
                      {{"records", records},
                       {"slope_mono", report.slope_mono},
                       {"slope_margin", report.slope_margin},
                       {"claim", claim}},
                      seconds_since(start))
                 .dump(2)
          << '\n';
    } else {
      out << "n,wall_ns_mono,wall_ns_margin,pair_count_mono,pair_count_margin\n";
      for (const auto& r : report.records) {
        out << r.n << ',' << format_double(r.wall_ns_mono) << ','
            << format_double(r.wall_ns_margin) << ',' << r.pair_count_mono << ','
            << r.pair_count_margin << '\n';
      }
    }
    err << claim << '\n'
        << "measured log-log slope: mono_loss " << report.slope_mono << ", margin_rank_loss "
        << report.slope_margin << " (median of " << report.reps << " reps)\n";
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_ablation(const AblationOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    AblationConfig cfg = load_config(opts.config_path, opts.overrides);
    if (opts.base_seed) {
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = *opts.base_seed + i;
    }
    cfg.validate();

    const AblationReport report = run_ablation(cfg);
    for (const auto& r : report.runs) {
      if (r.diverged) {
        err << "diverged: " << to_string(r.mode) << " seed " << r.seed << ": " << r.error << '\n';
      }
    }
    auto test_json = [](const PairedTest& t) {
      return json{{"pairs", t.pairs}, {"mean_diff", t.mean_diff}, {"t", t.t_stat},
                  {"p_value_one_sided", t.p_value}};
    };
    if (opts.format == Format::Json) {
      json runs = json::array();
      for (const auto& r : report.runs) {
        runs.push_back({{"mode", to_string(r.mode)}, {"seed", r.seed},
                        {"status", r.diverged ? "diverged" : "ok"}, {"test_plcc", r.test_plcc},
                        {"test_srocc", r.test_srocc}, {"train_loss", r.train_loss}});
      }
      json summaries = json::array();
      for (const auto& s : report.summaries) {
        summaries.push_back({{"mode", to_string(s.mode)}, {"runs", s.runs},
                             {"mean_plcc", s.mean_plcc}, {"std_plcc", s.std_plcc},
                             {"mean_srocc", s.mean_srocc}, {"std_srocc", s.std_srocc}});
      }
      out << envelope("ablation", to_key_values(cfg),
                      {{"runs", runs},
                       {"summaries", summaries},
                       {"bank_vs_mse_only", test_json(report.bank_vs_mse)},
                       {"mono_vs_mse_only", test_json(report.mono_vs_mse)}},
                      seconds_since(start))
                 .dump(2)
          << '\n';
    } else {
      write_ablation_csv(out, report);
    }
    err << "paired one-sided t-test, mse_plus_mono_bank > mse_only on test SROCC: mean diff "
        << report.bank_vs_mse.mean_diff << ", t=" << report.bank_vs_mse.t_stat
        << ", p=" << report.bank_vs_mse.p_value << '\n';
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_train(const TrainCmdOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    AblationConfig cfg = load_config(opts.config_path, opts.overrides);
    if (opts.seed) cfg.seeds = {*opts.seed};
    cfg.validate();

    SyntheticSpec spec = cfg.data;
    spec.seed = cfg.seeds.front();
    TrainConfig tc = cfg.train;
    tc.seed = spec.seed;
    tc.mode = loss_mode_from_string(opts.mode);
    const TrainResult res = train(gen_synthetic(spec), tc);

    if (opts.format == Format::Json) {
      json history = json::array();
      for (const auto& e : res.history) {
        history.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss},
                           {"test_plcc", e.test_plcc}, {"test_srocc", e.test_srocc}});
      }
      json config = to_key_values(cfg);
      config["seeds"] = std::to_string(spec.seed);
      config["mode"] = opts.mode;
      out << envelope("train", config,
                      {{"history", history},
                       {"final", history.back()},
                       {"bank_size", res.bank.size()}},
                      seconds_since(start))
                 .dump(2)
          << '\n';
    } else {
      out << "epoch,train_loss,test_plcc,test_srocc\n";
      for (const auto& e : res.history) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.test_plcc)
            << ',' << format_double(e.test_srocc) << '\n';
      }
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

}  // namespace softsrocc::cli
