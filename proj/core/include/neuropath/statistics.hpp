#pragma once

#include <optional>
#include <span>

namespace neuropath {

struct StatResult {
  double statistic = 0.0;
  std::optional<double> p_value;
};

// Spearman rank correlation with average ranks for ties. The p-value uses
// the t approximation with n-2 degrees of freedom (two-sided). Returns
// nullopt when either series is constant. Requires |xs| == |ys| >= 3.
std::optional<StatResult> spearman(std::span<const double> xs, std::span<const double> ys);

// Mann-Whitney U of `a`: #{a_i > b_j} + 0.5 * #{a_i == b_j}.
double mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Two-sided Wilcoxon rank-sum test. statistic is the normal score of U
// (positive when `a` tends to be larger). When both samples have fewer than
// 8 values the p-value comes from exact enumeration of rank assignments;
// otherwise from the normal approximation with tie and continuity
// correction.
StatResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

// Vargha-Delaney effect size: P(A > B) + 0.5 * P(A == B). No p-value.
StatResult a12(std::span<const double> a, std::span<const double> b);

}  // namespace neuropath
