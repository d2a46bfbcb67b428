#pragma once

// Subcommand bodies for the softsrocc tool. Each returns the process exit
// code and writes results to `out`, diagnostics to `err`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "softsrocc/kv_config.hpp"

namespace softsrocc::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kDegenerateVariance = 3,
  kInvalidConfig = 4,
  kGradcheckFailed = 5,
  kUsage = 64,
};

enum class Format { Csv, Json };

struct CorrOptions {
  std::string path;
  double steepness = 10.0;
  Format format = Format::Json;
};

struct GradcheckCmdOptions {
  std::size_t n = 8;
  double steepness = 10.0;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  Format format = Format::Csv;  // Csv selects the plain-text report
};

struct BenchOptions {
  std::vector<std::size_t> sizes{1024, 2048, 4096, 8192};
  std::size_t reps = 5;
  std::uint64_t seed = 1;
  Format format = Format::Csv;
};

struct AblationOptions {
  std::string config_path;  // empty: built-in defaults
  KeyValues overrides;      // applied after the file
  std::optional<std::uint64_t> base_seed;
  Format format = Format::Csv;
};

struct TrainCmdOptions {
  std::string config_path;
  KeyValues overrides;
  std::optional<std::uint64_t> seed;  // default: first configured seed
  std::string mode = "mse_plus_mono_bank";
  Format format = Format::Csv;
};

int cmd_corr(const CorrOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckCmdOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ablation(const AblationOptions& opts, std::ostream& out, std::ostream& err);
/// Single training run; CSV is one `epoch,train_loss,test_plcc,test_srocc` row per epoch.
int cmd_train(const TrainCmdOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace softsrocc::cli
