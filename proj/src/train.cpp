#include "softsrocc/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "softsrocc/correlation.hpp"
#include "softsrocc/errors.hpp"

namespace softsrocc {

namespace {

// Independent RNG streams derived from one user seed.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kSaltFeatures = 1;
constexpr std::uint64_t kSaltNoise = 2;
constexpr std::uint64_t kSaltSplit = 3;
constexpr std::uint64_t kSaltInit = 4;
constexpr std::uint64_t kSaltShuffle = 5;

}  // namespace

void SyntheticSpec::validate() const {
  if (n < 10) throw Error(ErrorCode::InvalidConfig, "n must be >= 10");
  if (dim < 1) throw Error(ErrorCode::InvalidConfig, "dim must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidConfig, "noise_sigma must be finite and >= 0");
  }
}

double synthetic_link(double latent) { return 1.0 / (1.0 + std::exp(-2.0 * latent)); }

SyntheticDataset gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticDataset data;
  data.dim = spec.dim;
  data.generator_seed = spec.seed;

  auto frng = stream(spec.seed, kSaltFeatures);
  std::normal_distribution<double> normal(0.0, 1.0);
  data.weights.resize(spec.dim);
  for (double& w : data.weights) w = normal(frng);
  const double wnorm = std::sqrt(std::inner_product(data.weights.begin(), data.weights.end(),
                                                    data.weights.begin(), 0.0));
  for (double& w : data.weights) w /= wnorm;

  data.features.resize(spec.n * spec.dim);
  for (double& f : data.features) f = normal(frng);

  auto nrng = stream(spec.seed, kSaltNoise);
  std::student_t_distribution<double> noise(3.0);
  std::vector<double> clean(spec.n), noisy(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto x = data.row(i);
    const double latent = std::inner_product(x.begin(), x.end(), data.weights.begin(), 0.0);
    clean[i] = synthetic_link(latent);
    // Student-t(3) noise; the heteroscedastic scale grows with the clean
    // score, which lies in (0, 1).
    const double scale = spec.heteroscedastic ? spec.noise_sigma * clean[i] * clean[i]
                                              : spec.noise_sigma * 0.25;
    noisy[i] = clean[i] + scale * noise(nrng);
  }

  // Min-max normalization of the labels to [0, 1]; affine, so ranks are kept.
  const auto [lo_it, hi_it] = std::minmax_element(noisy.begin(), noisy.end());
  const double lo = *lo_it;
  const double span = *hi_it - *lo_it > 0.0 ? *hi_it - *lo_it : 1.0;
  data.mos.resize(spec.n);
  data.clean_mos.resize(spec.n);
  data.ids.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    data.mos[i] = (noisy[i] - lo) / span;
    data.clean_mos[i] = (clean[i] - lo) / span;
    data.ids[i] = "s" + std::to_string(spec.seed) + "_" + std::to_string(i);
  }
  return data;
}

Split split_kfold(std::size_t n, std::size_t folds, std::size_t fold_index, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "folds must be >= 2");
  if (fold_index >= folds) throw Error(ErrorCode::InvalidConfig, "fold_index out of range");
  if (n < folds) throw Error(ErrorCode::InvalidConfig, "fewer samples than folds");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto rng = stream(seed, kSaltSplit);
  std::shuffle(perm.begin(), perm.end(), rng);

  const std::size_t lo = fold_index * n / folds;
  const std::size_t hi = (fold_index + 1) * n / folds;
  Split s;
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                perm.begin() + static_cast<std::ptrdiff_t>(hi));
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(lo));
  s.train.insert(s.train.end(), perm.begin() + static_cast<std::ptrdiff_t>(hi), perm.end());
  return s;
}

Predictor::Predictor(std::size_t dim, std::size_t hidden, std::uint64_t seed)
    : dim_(dim), hidden_(hidden), params_(hidden * dim + 2 * hidden + 1, 0.0) {
  if (dim == 0 || hidden == 0) throw Error(ErrorCode::InvalidConfig, "empty predictor");
  if (params_.size() > 10000) throw Error(ErrorCode::InvalidConfig, "predictor too large");
  auto rng = stream(seed, kSaltInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t i = 0; i < hidden * dim; ++i) params_[i] = s1 * normal(rng);
  double* w2 = params_.data() + hidden * dim + hidden;
  for (std::size_t i = 0; i < hidden; ++i) w2[i] = s2 * normal(rng);
  params_.back() = 0.5;
}

double Predictor::forward(std::span<const double> x) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * dim_;
  const double* w2 = b1 + hidden_;
  double out = params_.back();
  for (std::size_t h = 0; h < hidden_; ++h) {
    double z = b1[h];
    for (std::size_t d = 0; d < dim_; ++d) z += w1[h * dim_ + d] * x[d];
    out += w2[h] * std::tanh(z);
  }
  return out;
}

void Predictor::accumulate_grad(std::span<const double> x, double dpred,
                                std::span<double> grad) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * dim_;
  const double* w2 = b1 + hidden_;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hidden_ * dim_;
  double* g_w2 = g_b1 + hidden_;
  for (std::size_t h = 0; h < hidden_; ++h) {
    double z = b1[h];
    for (std::size_t d = 0; d < dim_; ++d) z += w1[h * dim_ + d] * x[d];
    const double a = std::tanh(z);
    g_w2[h] += dpred * a;
    const double dz = dpred * w2[h] * (1.0 - a * a);
    g_b1[h] += dz;
    for (std::size_t d = 0; d < dim_; ++d) g_w1[h * dim_ + d] += dz * x[d];
  }
  grad.back() += dpred;
}

std::vector<double> Predictor::predict(const SyntheticDataset& data,
                                       std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(forward(data.row(r)));
  return out;
}

const char* to_string(LossMode mode) noexcept {
  switch (mode) {
    case LossMode::MseOnly: return "mse_only";
    case LossMode::MsePlusMono: return "mse_plus_mono";
    case LossMode::MsePlusMonoBank: return "mse_plus_mono_bank";
  }
  return "unknown";
}

LossMode loss_mode_from_string(const std::string& name) {
  for (LossMode m : {LossMode::MseOnly, LossMode::MsePlusMono, LossMode::MsePlusMonoBank}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "loss_mode: unknown value '" + name + "'");
}

void TrainConfig::validate() const {
  soft.validate();
  if (!(lambda_mono >= 0.0) || !std::isfinite(lambda_mono)) {
    throw Error(ErrorCode::InvalidConfig, "lambda_mono must be finite and >= 0");
  }
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (mode != LossMode::MseOnly && batch_size < 2) {
    throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 2 with a mono loss");
  }
  if (epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  }
  if (retention_epochs < 1) throw Error(ErrorCode::InvalidConfig, "retention_epochs must be >= 1");
  if (hidden < 1) throw Error(ErrorCode::InvalidConfig, "hidden must be >= 1");
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "folds must be >= 2");
  if (fold_index >= folds) throw Error(ErrorCode::InvalidConfig, "fold_index must be < folds");
}

ObjectiveValue composite_objective(const Predictor& model,
                                   const SyntheticDataset& data,
                                   std::span<const std::size_t> rows,
                                   const TrainConfig& cfg,
                                   const MemoryBank* bank) {
  const std::size_t b = rows.size();
  ObjectiveValue out;
  out.preds = model.predict(data, rows);
  std::vector<double> mos(b);
  for (std::size_t i = 0; i < b; ++i) mos[i] = data.mos[rows[i]];

  std::vector<double> dpred(b);
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i) {
    const double r = out.preds[i] - mos[i];
    out.mse += r * r * inv_b;
    dpred[i] = 2.0 * r * inv_b;
  }
  out.loss = out.mse;

  if (cfg.mode != LossMode::MseOnly) {
    LossResult mono;
    if (cfg.mode == LossMode::MsePlusMonoBank && bank != nullptr) {
      std::vector<std::string> ids(b);
      for (std::size_t i = 0; i < b; ++i) ids[i] = data.ids[rows[i]];
      const Assembly joined = bank->assemble(ids, out.preds, mos);
      mono = mono_loss(joined.preds, joined.mos, cfg.soft);
    } else {
      mono = mono_loss(GradTaggedScores::all_live(out.preds), mos, cfg.soft);
    }
    out.mono = mono.loss;
    out.mono_degenerate = mono.degenerate;
    out.loss += cfg.lambda_mono * mono.loss;
    // Live elements lead the assembly, so the first b gradient entries
    // belong to this batch.
    for (std::size_t i = 0; i < b; ++i) dpred[i] += cfg.lambda_mono * mono.grad[i];
  }

  out.param_grad.assign(model.params().size(), 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    model.accumulate_grad(data.row(rows[i]), dpred[i], out.param_grad);
  }
  return out;
}

std::pair<double, double> plcc_srocc_or_zero(std::span<const double> mos,
                                             std::span<const double> preds) {
  try {
    return {plcc(mos, preds), srocc(mos, preds)};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateVariance) throw;
    return {0.0, 0.0};
  }
}

TrainResult train(const SyntheticDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  Split split = split_kfold(data.size(), cfg.folds, cfg.fold_index, cfg.seed);
  if (split.train.size() < cfg.batch_size) {
    throw Error(ErrorCode::InvalidConfig, "training split smaller than batch_size");
  }

  TrainResult result{{}, Predictor(data.dim, cfg.hidden, cfg.seed), std::move(split), {}, {},
                     MemoryBank(cfg.retention_epochs)};
  Predictor& model = result.model;
  MemoryBank& bank = result.bank;
  const bool use_bank = cfg.mode == LossMode::MsePlusMonoBank;

  std::vector<double> test_mos;
  for (std::size_t r : result.split.test) test_mos.push_back(data.mos[r]);

  auto shuffle_rng = stream(cfg.seed, kSaltShuffle);
  std::vector<std::size_t> order = result.split.train;
  std::vector<std::string> batch_ids;
  std::vector<double> batch_mos;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    // Incomplete trailing batches are dropped.
    for (std::size_t start = 0; start + cfg.batch_size <= order.size(); start += cfg.batch_size) {
      const std::span<const std::size_t> rows(order.data() + start, cfg.batch_size);
      ObjectiveValue obj;
      try {
        obj = composite_objective(model, data, rows, cfg, use_bank ? &bank : nullptr);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFinite) throw;
        throw Error(ErrorCode::DivergenceDetected,
                    "non-finite predictions at epoch " + std::to_string(epoch));
      }
      loss_sum += obj.loss;
      ++batches;

      auto params = model.params();
      for (std::size_t p = 0; p < params.size(); ++p) {
        params[p] -= cfg.learning_rate * obj.param_grad[p];
      }

      if (use_bank) {
        batch_ids.clear();
        batch_mos.clear();
        for (std::size_t r : rows) {
          batch_ids.push_back(data.ids[r]);
          batch_mos.push_back(data.mos[r]);
        }
        bank.update(batch_ids, obj.preds, batch_mos, static_cast<std::int64_t>(epoch));
      }
    }
    if (use_bank) bank.evict(static_cast<std::int64_t>(epoch));
    result.bank_sizes.push_back(bank.size());

    const double train_loss = loss_sum / static_cast<double>(batches);
    if (!std::isfinite(train_loss)) {
      throw Error(ErrorCode::DivergenceDetected,
                  "non-finite training loss at epoch " + std::to_string(epoch));
    }
    const std::vector<double> test_preds = model.predict(data, result.split.test);
    for (double p : test_preds) {
      if (!std::isfinite(p)) {
        throw Error(ErrorCode::DivergenceDetected,
                    "non-finite prediction at epoch " + std::to_string(epoch));
      }
    }
    const auto [tp, ts] = plcc_srocc_or_zero(test_mos, test_preds);
    result.history.push_back(EpochMetrics{epoch, train_loss, tp, ts});
    if (epoch + 1 == cfg.epochs) result.test_predictions = test_preds;
  }
  return result;
}

}  // namespace softsrocc
