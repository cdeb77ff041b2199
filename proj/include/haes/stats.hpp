#pragma once

// Rank statistics for comparing k methods over N datasets: Friedman's test on
// average ranks and the Nemenyi critical difference.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "haes/error.hpp"

namespace haes {

/// Rank 1 = largest value; tied values share their mean rank.
inline std::vector<double> midranks_descending(std::span<const double> values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> avg_ranks;  // per method
};

/// `values[i][j]` is method j's score on dataset i, higher is better.
/// p-value from the chi-square approximation with k-1 degrees of freedom.
inline FriedmanResult friedman_test(const std::vector<std::vector<double>>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw ConfigError("friedman_test: need at least 2 datasets");
  const std::size_t k = values.front().size();
  if (k < 2) throw ConfigError("friedman_test: need at least 2 methods");

  FriedmanResult out;
  out.avg_ranks.assign(k, 0.0);
  for (const auto& row : values) {
    if (row.size() != k) throw ConfigError("friedman_test: ragged matrix");
    for (double v : row) {
      if (std::isnan(v)) throw ConfigError("friedman_test: NaN value");
    }
    const auto r = midranks_descending(row);
    for (std::size_t j = 0; j < k; ++j) out.avg_ranks[j] += r[j];
  }
  for (double& r : out.avg_ranks) r /= static_cast<double>(n);

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double r : out.avg_ranks) sum_sq += r * r;
  const double stat = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  // Cancellation can leave a tiny negative value for all-tied input.
  out.statistic = std::max(stat, 0.0);
  const boost::math::chi_squared dist(kd - 1.0);
  out.p_value = out.statistic == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

// Two-tailed Nemenyi critical values q_0.05 for k = 2..10
// (studentized range statistic divided by sqrt(2)).
inline constexpr std::array<double, 9> kNemenyiQ05 = {1.960, 2.343, 2.569, 2.728, 2.850,
                                                      2.949, 3.031, 3.102, 3.164};

/// Critical difference between average ranks: q_alpha(k) * sqrt(k(k+1) / 6N).
inline double nemenyi_cd(std::size_t k, std::size_t n, double alpha = 0.05) {
  if (alpha != 0.05) throw ConfigError("nemenyi_cd: only alpha = 0.05 is tabulated");
  if (k < 2 || k > 10) throw ConfigError("nemenyi_cd: k must lie in [2, 10]");
  if (n < 2) throw ConfigError("nemenyi_cd: need at least 2 datasets");
  const double kd = static_cast<double>(k);
  return kNemenyiQ05[k - 2] * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

/// Maximal runs of methods (sorted by average rank) whose end-to-end rank gap
/// is below `cd`. Runs of one method are omitted; a method may sit in several runs.
inline std::vector<std::vector<std::string>> cd_groups(const std::vector<std::string>& methods,
                                                       std::span<const double> avg_ranks,
                                                       double cd) {
  if (methods.size() != avg_ranks.size()) throw ConfigError("cd_groups: size mismatch");
  std::vector<std::size_t> order(methods.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return avg_ranks[a] < avg_ranks[b]; });
  std::vector<std::vector<std::string>> groups;
  std::size_t last_end = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t j = i;
    while (j + 1 < order.size() && avg_ranks[order[j + 1]] - avg_ranks[order[i]] < cd) ++j;
    if (j > i && (groups.empty() || j > last_end)) {
      std::vector<std::string> g;
      for (std::size_t t = i; t <= j; ++t) g.push_back(methods[order[t]]);
      groups.push_back(std::move(g));
      last_end = j;
    }
  }
  return groups;
}

}  // namespace haes
