#include <gtest/gtest.h>

#include "test_util.hpp"

namespace haes {
namespace {

// Rank by pairwise counting: 1 + #greater + 0.5 * #equal-others.
std::vector<double> counted_ranks(const std::vector<double>& row) {
  std::vector<double> r(row.size(), 1.0);
  for (std::size_t i = 0; i < row.size(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == i) continue;
      if (row[j] > row[i]) r[i] += 1.0;
      else if (row[j] == row[i]) r[i] += 0.5;
    }
  }
  return r;
}

// Sum-of-rank-squares form: 12/(N k (k+1)) * sum R_j^2 - 3 N (k+1).
double friedman_oracle(const std::vector<std::vector<double>>& m) {
  const double n = static_cast<double>(m.size());
  const double k = static_cast<double>(m[0].size());
  std::vector<double> totals(m[0].size(), 0.0);
  for (const auto& row : m) {
    const auto r = counted_ranks(row);
    for (std::size_t j = 0; j < r.size(); ++j) totals[j] += r[j];
  }
  double sq = 0.0;
  for (double t : totals) sq += t * t;
  return 12.0 / (n * k * (k + 1.0)) * sq - 3.0 * n * (k + 1.0);
}

TEST(RanksTest, MidranksAndRowSum) {
  EXPECT_EQ(midranks_descending(std::vector<double>{0.3, 0.9, 0.3, 0.1}),
            (std::vector<double>{2.5, 1.0, 2.5, 4.0}));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> row(6);
    for (double& v : row) v = static_cast<double>(rng() % 4);
    const auto r = midranks_descending(row);
    EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), 21.0);
    EXPECT_EQ(r, counted_ranks(row));
  }
}

TEST(FriedmanTest, IdenticalOrderingK3N10) {
  std::vector<std::vector<double>> m(10, std::vector<double>{0.9, 0.5, 0.1});
  const auto r = friedman_test(m);
  EXPECT_NEAR(r.statistic, 20.0, 1e-12);
  EXPECT_NEAR(r.p_value, std::exp(-10.0), 1e-15);  // chi2 with 2 dof: exp(-x/2)
  EXPECT_LT(r.p_value, 0.001);
  EXPECT_EQ(r.avg_ranks, (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(FriedmanTest, ConstantMatrix) {
  std::vector<std::vector<double>> m(7, std::vector<double>(4, 0.5));
  const auto r = friedman_test(m);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  for (double a : r.avg_ranks) EXPECT_EQ(a, 2.5);
}

TEST(FriedmanTest, MatchesOracleAndMonotoneInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<std::vector<double>> m(20, std::vector<double>(5));
    for (auto& row : m) {
      for (double& v : row) v = std::round(u(rng) * 8.0) / 8.0;  // forces ties
    }
    const auto r = friedman_test(m);
    EXPECT_NEAR(r.statistic, friedman_oracle(m), 1e-9);
    auto g = m;
    for (auto& row : g) {
      for (double& v : row) v = std::exp(2.0 * v) + 3.0;
    }
    EXPECT_NEAR(friedman_test(g).statistic, r.statistic, 1e-12);
  }
}

TEST(FriedmanTest, TwoMethodsMatchSignCount) {
  // k=2 without ties: stat = (wins - losses)^2 / N.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> m(15, std::vector<double>(2));
  double wins = 0.0;
  for (auto& row : m) {
    row = {u(rng), u(rng)};
    wins += row[0] > row[1];
  }
  const double losses = 15.0 - wins;
  EXPECT_NEAR(friedman_test(m).statistic, (wins - losses) * (wins - losses) / 15.0, 1e-12);
}

TEST(FriedmanTest, Errors) {
  EXPECT_THROW(friedman_test({{1.0, 2.0}}), ConfigError);
  EXPECT_THROW(friedman_test({{1.0}, {2.0}}), ConfigError);
  EXPECT_THROW(friedman_test({{1.0, 2.0}, {1.0}}), ConfigError);
}

TEST(NemenyiTest, Formula) {
  for (std::size_t n : {2u, 5u, 20u, 83u}) {
    EXPECT_NEAR(nemenyi_cd(2, n), 1.960 / std::sqrt(double(n)), 1e-12);
    EXPECT_NEAR(nemenyi_cd(5, 2 * n), nemenyi_cd(5, n) / std::sqrt(2.0), 1e-12);
  }
  EXPECT_NEAR(nemenyi_cd(5, 20), 2.728 * std::sqrt(30.0 / 120.0), 1e-12);
  EXPECT_LT(nemenyi_cd(5, 1000000), 0.01);
  EXPECT_THROW(nemenyi_cd(1, 10), ConfigError);
  EXPECT_THROW(nemenyi_cd(11, 10), ConfigError);
  EXPECT_THROW(nemenyi_cd(3, 10, 0.1), ConfigError);
}

TEST(CdGroupsTest, FiveMethodExample) {
  // Sorted ranks 1.2, 1.9, 2.6, 4.1, 4.2 with CD 1.0:
  // A-B (0.7), B-C (0.7) but not A-C (1.4); D-E.
  const std::vector<std::string> names = {"C", "A", "E", "B", "D"};
  const std::vector<double> ranks = {2.6, 1.2, 4.2, 1.9, 4.1};
  const auto g = cd_groups(names, ranks, 1.0);
  const std::vector<std::vector<std::string>> expected = {{"A", "B"}, {"B", "C"}, {"D", "E"}};
  EXPECT_EQ(g, expected);
  EXPECT_TRUE(cd_groups(names, ranks, 0.05).empty());
  EXPECT_EQ(cd_groups(names, ranks, 10.0),
            (std::vector<std::vector<std::string>>{{"A", "B", "C", "D", "E"}}));
}

TEST(CdGroupsTest, GroupedIffGapBelowCd) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  const std::vector<std::string> names = {"a", "b", "c", "d", "e"};
  for (int t = 0; t < 200; ++t) {
    std::vector<double> ranks(5);
    for (double& r : ranks) r = u(rng);
    const double cd = u(rng) - 1.0;
    const auto groups = cd_groups(names, ranks, cd);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) {
        bool together = false;
        for (const auto& g : groups) {
          const bool hi = std::find(g.begin(), g.end(), names[i]) != g.end();
          const bool hj = std::find(g.begin(), g.end(), names[j]) != g.end();
          together = together || (hi && hj);
        }
        EXPECT_EQ(together, std::abs(ranks[i] - ranks[j]) < cd);
      }
    }
  }
}

}  // namespace
}  // namespace haes
