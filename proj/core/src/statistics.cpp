#include "neuropath/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "neuropath/errors.hpp"

namespace neuropath {

namespace {

// 1-based average ranks.
std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.empty() || b.empty()) {
    throw UsageError(std::string(what) + " needs two nonempty samples");
  }
}

}  // namespace

std::optional<StatResult> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw UsageError("spearman: series lengths differ (" + std::to_string(xs.size()) + " vs " +
                     std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) throw UsageError("spearman needs at least 3 pairs");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  StatResult r{rho, 0.0};
  if (std::abs(rho) < 1.0) {
    const double df = n - 2.0;
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    boost::math::students_t dist(df);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return r;
}

double mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

StatResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "wilcoxon_rank_sum");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const double n = static_cast<double>(n1 + n2);

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = average_ranks(pooled);

  const double u = mann_whitney_u(a, b);
  const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;

  // Tie-corrected variance of U.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((n + 1.0) - tie_term / (n * (n - 1.0)));
  const double sigma = var > 0.0 ? std::sqrt(var) : 0.0;

  StatResult r;
  r.statistic = sigma > 0.0 ? (u - mu) / sigma : 0.0;

  if (n1 < 8 && n2 < 8) {
    // Exact: every way of assigning n1 of the pooled ranks to sample a.
    const double r_obs = std::accumulate(ranks.begin(), ranks.begin() + n1, 0.0);
    const double expected = static_cast<double>(n1) * (n + 1.0) / 2.0;
    const double observed_dev = std::abs(r_obs - expected) - 1e-9;
    std::vector<bool> pick(pooled.size(), false);
    std::fill(pick.begin(), pick.begin() + n1, true);
    std::size_t total = 0, extreme = 0;
    // Enumerate combinations via prev_permutation over the selection mask.
    do {
      double sum = 0.0;
      for (std::size_t i = 0; i < pick.size(); ++i)
        if (pick[i]) sum += ranks[i];
      ++total;
      if (std::abs(sum - expected) >= observed_dev) ++extreme;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  } else if (sigma == 0.0) {
    r.p_value = 1.0;
  } else {
    const double corrected = std::max(0.0, std::abs(u - mu) - 0.5);
    r.p_value = std::min(1.0, normal_two_sided(corrected / sigma));
  }
  return r;
}

StatResult a12(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "a12");
  return {mann_whitney_u(a, b) / (static_cast<double>(a.size()) * static_cast<double>(b.size())),
          std::nullopt};
}

}  // namespace neuropath
