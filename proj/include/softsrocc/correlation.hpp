#pragma once

// Exact (non-differentiable) correlation and ranking primitives.

#include <span>
#include <vector>

namespace softsrocc {

using RankVector = std::vector<double>;

/// Pearson linear correlation coefficient of two equal-length vectors.
/// Throws DegenerateVariance when either vector is constant.
double plcc(std::span<const double> a, std::span<const double> b);

/// Heaviside-sum rank: rank_i = sum_j H(x_i - x_j) over all j, self term
/// included, with H(0) = 1/2. Tie-free input gives (0-based rank) + 1/2 and
/// tied elements share the average rank. Sum of ranks is n^2/2.
RankVector hard_rank(std::span<const double> x);

/// SROCC as PLCC of hard ranks. Handles ties through fractional ranks.
double srocc(std::span<const double> q, std::span<const double> qhat);

/// The 1 - 6 sum d^2 / (n (n^2 - 1)) closed form. Only valid without ties;
/// throws InvalidArgument if either input contains a tie.
double srocc_closed_form(std::span<const double> q, std::span<const double> qhat);

namespace detail {
void require_finite(std::span<const double> x, const char* what);
void require_same_length(std::span<const double> a, std::span<const double> b);
}  // namespace detail

}  // namespace softsrocc
