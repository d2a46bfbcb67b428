#pragma once

// Central finite-difference audits of the analytic gradients.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace softsrocc {

/// Central differences of a scalar function at `x`.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step);

/// max_i |a_i - f_i| / max(|a_i|, |f_i|, floor), where floor is 1e-3 of the
/// largest magnitude in either vector. Entries many orders below the
/// dominant scale are compared in absolute terms against that scale, since
/// finite-difference noise alone exceeds them.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

struct GradcheckOptions {
  std::size_t n = 8;
  double steepness = 10.0;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
};

struct GradcheckSuite {
  std::string name;
  std::size_t trials = 0;
  double worst_error = 0.0;
  std::size_t worst_trial = 0;
  double threshold = 0.0;
  bool pass = true;
};

struct GradcheckReport {
  std::vector<GradcheckSuite> suites;
  bool pass = true;
  bool vacuous = false;  // trials == 0
};

/// Loss-level threshold: 1e-5, loosened to 1e-4 for steepness >= 1000 where
/// the sharper tanh raises finite-difference truncation error.
double gradcheck_threshold(double steepness);

/// Step for the loss-level checks. Scaled as 1e-5 * min(1, 10 / k) so the
/// product of step and steepness stays small.
double gradcheck_step(double steepness);

/// Runs three suites on inputs drawn uniformly from [0, 1]:
///   soft_rank_jacobian   analytic Jacobian vs differences of soft_rank
///   mono_loss            gradient with a random grad mask
///   train_objective      composite MSE + mono objective (each loss mode,
///                        with a populated bank) w.r.t. predictor parameters
GradcheckReport run_gradcheck(const GradcheckOptions& opts);

}  // namespace softsrocc
