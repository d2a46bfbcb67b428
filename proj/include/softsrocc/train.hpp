#pragma once

// Desk-scale training harness: synthetic monotone regression data, a
// two-layer perceptron with hand-written backprop, and SGD on
// MSE + lambda * mono_loss, optionally fed through a MemoryBank.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softsrocc/memory_bank.hpp"
#include "softsrocc/soft_rank.hpp"

namespace softsrocc {

struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t n = 400;
  std::size_t dim = 8;
  double noise_sigma = 0.3;
  bool heteroscedastic = true;

  void validate() const;
};

/// mos = normalize(g(w . x) + s * t3), g a fixed logistic curve and t3
/// Student-t noise with 3 degrees of freedom. With heteroscedastic noise the
/// scale s grows with the clean score, so a few heavy-tailed high-score
/// samples dominate the squared error while carrying little ordering
/// information; MSE fits are then rank-suboptimal.
struct SyntheticDataset {
  std::size_t dim = 0;
  std::vector<double> features;  // row-major, size() x dim
  std::vector<double> mos;
  std::vector<double> clean_mos;  // g(w . x) before noise, same normalization
  std::vector<double> weights;    // true direction w
  std::vector<std::string> ids;
  std::uint64_t generator_seed = 0;

  std::size_t size() const noexcept { return mos.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
};

/// Fixed strictly increasing link used by the generator.
double synthetic_link(double latent);

SyntheticDataset gen_synthetic(const SyntheticSpec& spec);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffles 0..n-1 with `seed` and takes the fold_index-th contiguous slice
/// as the test set.
Split split_kfold(std::size_t n, std::size_t folds, std::size_t fold_index, std::uint64_t seed);

/// d -> hidden (tanh) -> 1 perceptron. Parameters are stored flat as
/// [W1 (hidden x d, row-major) | b1 (hidden) | w2 (hidden) | b2].
class Predictor {
 public:
  Predictor(std::size_t dim, std::size_t hidden, std::uint64_t seed);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  double forward(std::span<const double> x) const;

  /// grad += dpred * d forward(x) / d params.
  void accumulate_grad(std::span<const double> x, double dpred, std::span<double> grad) const;

  std::vector<double> predict(const SyntheticDataset& data, std::span<const std::size_t> rows) const;

 private:
  std::size_t dim_;
  std::size_t hidden_;
  std::vector<double> params_;
};

enum class LossMode { MseOnly, MsePlusMono, MsePlusMonoBank };

const char* to_string(LossMode mode) noexcept;
LossMode loss_mode_from_string(const std::string& name);

struct TrainConfig {
  LossMode mode = LossMode::MseOnly;
  double lambda_mono = 1.0;
  SoftRankConfig soft{};
  std::size_t batch_size = 16;
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  std::int64_t retention_epochs = 1;
  std::size_t hidden = 16;
  std::size_t folds = 5;
  std::size_t fold_index = 0;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_plcc = 0.0;
  double test_srocc = 0.0;
};

struct ObjectiveValue {
  double loss = 0.0;
  double mse = 0.0;
  double mono = 0.0;
  bool mono_degenerate = false;
  std::vector<double> preds;       // fresh predictions for `rows`
  std::vector<double> param_grad;  // d loss / d params
};

/// MSE over the batch plus lambda * mono_loss. The mono term sees the batch
/// alone, or the batch assembled with `bank` when one is given and the mode
/// is MsePlusMonoBank. Bank entries are constants.
ObjectiveValue composite_objective(const Predictor& model,
                                   const SyntheticDataset& data,
                                   std::span<const std::size_t> rows,
                                   const TrainConfig& cfg,
                                   const MemoryBank* bank);

struct TrainResult {
  std::vector<EpochMetrics> history;
  Predictor model;
  Split split;
  std::vector<double> test_predictions;  // final model on split.test
  std::vector<std::size_t> bank_sizes;   // after each epoch's eviction
  MemoryBank bank;
};

/// Plain SGD with a fixed learning rate over shuffled mini-batches. The
/// bank is updated after every batch and evicted at the end of every epoch.
/// Throws DivergenceDetected if the epoch loss is not finite.
TrainResult train(const SyntheticDataset& data, const TrainConfig& cfg);

/// Test metrics as reported in EpochMetrics. A constant predictor scores 0.
std::pair<double, double> plcc_srocc_or_zero(std::span<const double> mos,
                                             std::span<const double> preds);

}  // namespace softsrocc
