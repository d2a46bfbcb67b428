#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "softsrocc/score_file.hpp"

namespace cli = softsrocc::cli;

int main(int argc, char** argv) {
  CLI::App app{"Differentiable SROCC loss toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SOFTSROCC_VERSION);

  std::string out_path;
  std::string format_name;
  const std::map<std::string, cli::Format> formats{{"csv", cli::Format::Csv},
                                                   {"json", cli::Format::Json}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write results to this file instead of stdout");
    sub->add_option("--format", format_name, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  cli::CorrOptions corr;
  auto* corr_cmd = app.add_subcommand("corr", "PLCC, SROCC and soft SROCC of a score file");
  corr_cmd->add_option("path", corr.path, "CSV with header sample_id,mos,pred")->required();
  corr_cmd->add_option("--k", corr.steepness, "Soft-rank steepness")->check(CLI::PositiveNumber);
  add_common(corr_cmd);

  cli::GradcheckCmdOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient audit");
  grad_cmd->add_option("--n", grad.n, "Vector length (>= 3)");
  grad_cmd->add_option("--k", grad.steepness, "Soft-rank steepness")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--seed", grad.seed, "RNG seed");
  grad_cmd->add_option("--trials", grad.trials, "Random instances per suite");
  add_common(grad_cmd);

  cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Wall-clock scaling of mono vs margin loss");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated, strictly increasing")
      ->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per size (median reported)");
  bench_cmd->add_option("--seed", bench.seed, "RNG seed");
  add_common(bench_cmd);

  cli::AblationOptions abl;
  std::optional<double> lambda, steepness;
  std::optional<std::size_t> folds, threads;
  std::optional<std::int64_t> retention;
  std::optional<std::uint64_t> seed;
  auto* abl_cmd = app.add_subcommand("ablation", "mse_only vs +mono vs +mono+bank sweep");
  abl_cmd->add_option("config", abl.config_path, "key = value config file (optional)");
  abl_cmd->add_option("--lambda", lambda, "Weight of the mono loss");
  abl_cmd->add_option("--k", steepness, "Soft-rank steepness");
  abl_cmd->add_option("--seed", seed, "First seed; the sweep uses consecutive seeds");
  abl_cmd->add_option("--folds", folds, "Cross-validation folds");
  abl_cmd->add_option("--retention", retention, "Memory-bank retention in epochs");
  abl_cmd->add_option("--threads", threads, "Worker threads over seeds");
  add_common(abl_cmd);

  cli::TrainCmdOptions trn;
  std::optional<double> trn_lambda, trn_steepness;
  std::optional<std::int64_t> trn_retention;
  auto* train_cmd = app.add_subcommand("train", "One training run; per-epoch metrics");
  train_cmd->add_option("config", trn.config_path, "key = value config file (optional)");
  train_cmd->add_option("--mode", trn.mode, "Loss mode")
      ->check(CLI::IsMember({"mse_only", "mse_plus_mono", "mse_plus_mono_bank"}));
  train_cmd->add_option("--lambda", trn_lambda, "Weight of the mono loss");
  train_cmd->add_option("--k", trn_steepness, "Soft-rank steepness");
  train_cmd->add_option("--seed", trn.seed, "Data, split and init seed");
  train_cmd->add_option("--retention", trn_retention, "Memory-bank retention in epochs");
  add_common(train_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path);
    if (!file_out) {
      std::cerr << "cannot open output file '" << out_path << "'\n";
      return cli::kFailure;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file_out;
  auto format_or = [&](cli::Format fallback) {
    return format_name.empty() ? fallback : formats.at(format_name);
  };

  if (*corr_cmd) {
    corr.format = format_or(cli::Format::Json);
    return cli::cmd_corr(corr, out, std::cerr);
  }
  if (*grad_cmd) {
    grad.format = format_or(cli::Format::Csv);
    return cli::cmd_gradcheck(grad, out, std::cerr);
  }
  if (*bench_cmd) {
    bench.format = format_or(cli::Format::Csv);
    return cli::cmd_bench(bench, out, std::cerr);
  }
  using softsrocc::format_double;
  if (*train_cmd) {
    trn.format = format_or(cli::Format::Csv);
    if (trn_lambda) trn.overrides["lambda_mono"] = format_double(*trn_lambda);
    if (trn_steepness) trn.overrides["steepness"] = format_double(*trn_steepness);
    if (trn_retention) trn.overrides["retention_epochs"] = std::to_string(*trn_retention);
    return cli::cmd_train(trn, out, std::cerr);
  }
  abl.format = format_or(cli::Format::Csv);
  if (lambda) abl.overrides["lambda_mono"] = format_double(*lambda);
  if (steepness) abl.overrides["steepness"] = format_double(*steepness);
  if (folds) abl.overrides["folds"] = std::to_string(*folds);
  if (retention) abl.overrides["retention_epochs"] = std::to_string(*retention);
  if (threads) abl.overrides["threads"] = std::to_string(*threads);
  abl.base_seed = seed;
  return cli::cmd_ablation(abl, out, std::cerr);
}
