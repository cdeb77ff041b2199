#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "haes/ensemble.hpp"
#include "haes/error.hpp"
#include "haes/repo.hpp"

namespace haes {

using Point2 = std::array<double, 2>;

/// Both objectives are minimized: accuracy_loss = 1 - ROC AUC.
struct ObjectivePoint {
  double accuracy_loss = 0.0;
  double inference_time_s = 0.0;
};

struct NormalizationBounds {
  Point2 min{0.0, 0.0};
  Point2 max{1.0, 1.0};
};

namespace detail {

// Mann-Whitney form of the AUC with midranks for tied scores.
template <class IsPositive>
double auc_by_midranks(std::span<const double> scores, IsPositive is_positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double s : scores) {
    if (std::isnan(s)) throw ConfigError("roc_auc: NaN score");
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (is_positive(order[t])) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ConfigError("roc_auc: labels contain a single class");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

}  // namespace detail

/// P(score_pos > score_neg) + 0.5 P(tie). Labels must be 0 or 1.
inline double roc_auc_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ConfigError("roc_auc: length mismatch");
  for (int y : labels) {
    if (y != 0 && y != 1) throw ConfigError("roc_auc_binary: labels must be 0 or 1");
  }
  return detail::auc_by_midranks(scores, [&](std::size_t i) { return labels[i] == 1; });
}

/// Macro average of one-vs-rest AUCs, column k scoring class k.
inline double roc_auc_multiclass(const ProbMatrix& probs, std::span<const int> labels) {
  const std::size_t k = probs.cols();
  if (k < 2) throw ConfigError("roc_auc_multiclass: need at least 2 classes");
  if (probs.rows() != labels.size()) throw ConfigError("roc_auc: length mismatch");
  std::vector<std::size_t> seen(k, 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= k) throw ConfigError("roc_auc: label out of range");
    ++seen[static_cast<std::size_t>(y)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (seen[c] == 0) {
      throw ConfigError("roc_auc_multiclass: class " + std::to_string(c) + " absent from labels");
    }
  }
  if (k == 2) {
    const auto scores = probs.column(1);
    return detail::auc_by_midranks(scores, [&](std::size_t i) { return labels[i] == 1; });
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto scores = probs.column(c);
    const int cls = static_cast<int>(c);
    sum += detail::auc_by_midranks(scores, [&](std::size_t i) { return labels[i] == cls; });
  }
  return sum / static_cast<double>(k);
}

/// Distinct members with nonzero count.
inline std::size_t ensemble_size(const Ensemble& e) noexcept { return e.size(); }

/// Sum over distinct members; a repeated model is only run once.
inline double ensemble_inference_time(const Ensemble& e, const ModelRepo& repo) {
  check_ensemble(e, repo.n_models());
  double t = 0.0;
  for (const auto& [m, c] : e.counts()) t += repo.models[m].inference_time_s;
  return t;
}

namespace detail {

inline std::size_t argmax_row(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

}  // namespace detail

/// Mean pairwise rate at which distinct members' validation argmax disagree.
inline double prediction_diversity(const Ensemble& e, const ModelRepo& repo) {
  check_ensemble(e, repo.n_models());
  const std::size_t m = e.size();
  if (m < 2) return 0.0;
  const std::size_t n = repo.n_val();
  const std::size_t k = repo.n_classes;

  // Per row: disagreeing pairs = C(m,2) - sum_c C(votes_c, 2).
  std::vector<std::uint32_t> votes(n * k, 0);
  for (const auto& [model, c] : e.counts()) {
    const ProbMatrix& p = repo.models[model].val_predictions;
    for (std::size_t i = 0; i < n; ++i) ++votes[i * k + detail::argmax_row(p.row(i))];
  }
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  double agreeing = 0.0;
  for (std::uint32_t v : votes) agreeing += static_cast<double>(v) * (v - 1.0) / 2.0;
  const double disagreeing = pairs * static_cast<double>(n) - agreeing;
  return disagreeing / (pairs * static_cast<double>(n));
}

/// Mean pairwise cosine of member config vectors mapped to [0,1]; 1 for singletons.
inline double config_similarity(const Ensemble& e, const ModelRepo& repo) {
  check_ensemble(e, repo.n_models());
  if (!repo.has_config_features()) {
    throw ConfigError("config_similarity: repo has no config_features");
  }
  std::vector<std::size_t> members;
  for (const auto& [m, c] : e.counts()) members.push_back(m);
  if (members.size() < 2) return 1.0;

  auto norm = [&](std::size_t m) {
    const auto& f = repo.models[m].config_features;
    return std::sqrt(std::inner_product(f.begin(), f.end(), f.begin(), 0.0));
  };
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const auto& fa = repo.models[members[a]].config_features;
      const auto& fb = repo.models[members[b]].config_features;
      const double denom = norm(members[a]) * norm(members[b]);
      // A zero vector has no direction; it counts as orthogonal.
      const double cosine =
          denom > 0.0 ? std::inner_product(fa.begin(), fa.end(), fb.begin(), 0.0) / denom : 0.0;
      sum += std::clamp(cosine, -1.0, 1.0);
      ++pairs;
    }
  }
  return (sum / static_cast<double>(pairs) + 1.0) / 2.0;
}

/// Component-wise min/max over a non-empty point set.
inline NormalizationBounds bounds_of(std::span<const ObjectivePoint> points) {
  if (points.empty()) throw ConfigError("bounds_of: no points");
  NormalizationBounds b{{points[0].accuracy_loss, points[0].inference_time_s},
                        {points[0].accuracy_loss, points[0].inference_time_s}};
  for (const auto& p : points) {
    b.min[0] = std::min(b.min[0], p.accuracy_loss);
    b.max[0] = std::max(b.max[0], p.accuracy_loss);
    b.min[1] = std::min(b.min[1], p.inference_time_s);
    b.max[1] = std::max(b.max[1], p.inference_time_s);
  }
  return b;
}

/// (v - min) / (max - min) clamped to [0,1]; a degenerate objective maps to 0.
inline Point2 minmax_normalize(const ObjectivePoint& p, const NormalizationBounds& b) {
  const Point2 raw{p.accuracy_loss, p.inference_time_s};
  Point2 out{};
  for (std::size_t d = 0; d < 2; ++d) {
    const double span = b.max[d] - b.min[d];
    out[d] = span > 0.0 ? std::clamp((raw[d] - b.min[d]) / span, 0.0, 1.0) : 0.0;
  }
  return out;
}

inline std::vector<Point2> minmax_normalize(std::span<const ObjectivePoint> points,
                                            const NormalizationBounds& b) {
  if (b.min[0] > b.max[0] || b.min[1] > b.max[1]) {
    throw ConfigError("minmax_normalize: bounds have min > max");
  }
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(minmax_normalize(p, b));
  return out;
}

}  // namespace haes
