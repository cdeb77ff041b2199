#pragma once

// Test fixtures and brute-force oracles. Oracles here deliberately avoid the
// library's sort/sweep code paths.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "haes/haes.hpp"

namespace haes::testing {

/// All-pairs AUC: P(pos > neg) + 0.5 P(tie).
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Macro one-vs-rest AUC via the pairwise oracle on a naive weighted mean.
inline double naive_ensemble_auc(const Ensemble& e, const ModelRepo& repo, Split split) {
  const auto& labels = split == Split::kValidation ? repo.val_labels : repo.test_labels;
  const std::size_t n = labels.size();
  const std::size_t k = repo.n_classes;
  double total = 0.0;
  for (const auto& [m, c] : e.counts()) total += c;
  std::vector<std::vector<double>> mean(n, std::vector<double>(k, 0.0));
  for (const auto& [m, c] : e.counts()) {
    const ProbMatrix& p = predictions(repo, m, split);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) mean[i][j] += c / total * p(i, j);
    }
  }
  auto one_vs_rest = [&](std::size_t cls) {
    std::vector<double> s(n);
    std::vector<int> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = mean[i][cls];
      pos[i] = labels[i] == static_cast<int>(cls);
    }
    return pairwise_auc(s, pos);
  };
  if (k == 2) return one_vs_rest(1);
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += one_vs_rest(c);
  return sum / static_cast<double>(k);
}

/// O(n^2) dominance filter over distinct points (minimization).
inline std::vector<Point2> brute_force_front(const std::vector<Point2>& pts) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j == i) continue;
      const bool weakly = pts[j][0] <= pts[i][0] && pts[j][1] <= pts[i][1];
      const bool strictly = pts[j][0] < pts[i][0] || pts[j][1] < pts[i][1];
      dominated = weakly && strictly;
    }
    if (dominated) continue;
    bool seen = false;
    for (const auto& o : out) seen = seen || o == pts[i];
    if (!seen) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Probability matrix from explicit rows.
inline ProbMatrix matrix(const std::vector<std::vector<double>>& rows) {
  ProbMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

/// Binary matrix whose class-1 column is `p1`.
inline ProbMatrix binary(const std::vector<double>& p1) {
  ProbMatrix m(p1.size(), 2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    m(i, 0) = 1.0 - p1[i];
    m(i, 1) = p1[i];
  }
  return m;
}

/// Binary repo where validation and test share labels and predictions.
inline ModelRepo binary_repo(const std::vector<int>& labels,
                             const std::vector<std::vector<double>>& p1_per_model,
                             std::vector<double> times = {}) {
  ModelRepo repo;
  repo.dataset_id = "toy";
  repo.n_classes = 2;
  repo.val_labels = labels;
  repo.test_labels = labels;
  if (times.empty()) times.assign(p1_per_model.size(), 0.1);
  for (std::size_t m = 0; m < p1_per_model.size(); ++m) {
    ModelEntry e;
    e.model_id = "m" + std::to_string(m);
    e.inference_time_s = times[m];
    e.val_predictions = binary(p1_per_model[m]);
    e.test_predictions = binary(p1_per_model[m]);
    repo.models.push_back(std::move(e));
  }
  return repo;
}

inline SyntheticRepoConfig small_config(std::uint64_t seed, std::size_t n_models = 10) {
  SyntheticRepoConfig c;
  c.n_models = n_models;
  c.n_val = 120;
  c.n_test = 120;
  c.seed = seed;
  return c;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("haes_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace haes::testing
