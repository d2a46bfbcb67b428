#pragma once

// Paired-seed sweep over the three loss modes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "softsrocc/kv_config.hpp"
#include "softsrocc/train.hpp"

namespace softsrocc {

struct AblationRun {
  LossMode mode = LossMode::MseOnly;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;  // set when diverged
  double test_plcc = 0.0;
  double test_srocc = 0.0;
  double train_loss = 0.0;
};

struct ModeSummary {
  LossMode mode = LossMode::MseOnly;
  std::size_t runs = 0;  // converged runs only
  double mean_plcc = 0.0;
  double std_plcc = 0.0;
  double mean_srocc = 0.0;
  double std_srocc = 0.0;
};

/// One-sided paired t-test of treatment > control on test SROCC.
struct PairedTest {
  std::size_t pairs = 0;
  double mean_diff = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

struct AblationReport {
  std::vector<AblationRun> runs;  // sorted by (mode, seed)
  std::vector<ModeSummary> summaries;
  PairedTest bank_vs_mse;
  PairedTest mono_vs_mse;
};

/// For each seed, generates the dataset with that seed and trains every mode
/// with the same seed, so runs are paired. Seeds fan out over cfg.threads
/// workers; a divergent run is recorded and the sweep continues.
AblationReport run_ablation(const AblationConfig& cfg);

PairedTest paired_one_sided_test(const std::vector<double>& treatment,
                                 const std::vector<double>& control);

/// Header `kind,mode,seed,status,test_plcc,test_srocc,train_loss,plcc_std,srocc_std`.
/// One `run` row per (mode, seed), then one `summary` row per mode holding
/// means in the test_* columns and standard deviations in the *_std columns.
void write_ablation_csv(std::ostream& out, const AblationReport& report);

}  // namespace softsrocc
