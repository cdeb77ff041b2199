#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "haes/ensemble.hpp"
#include "haes/metrics.hpp"
#include "haes/repo.hpp"

namespace haes {

/// An ensemble with everything the selectors and the benchmark need to know about it.
struct EvaluatedEnsemble {
  Ensemble ensemble;
  double val_auc = 0.0;
  double test_auc = 0.0;
  double inference_time_s = 0.0;
  std::size_t size = 0;
  Point2 behavior{0.0, 0.0};

  ObjectivePoint objectives() const { return {1.0 - test_auc, inference_time_s}; }

  friend bool operator==(const EvaluatedEnsemble&, const EvaluatedEnsemble&) = default;
};

using BehaviorFn = std::function<Point2(const Ensemble&, const ModelRepo&)>;

/// Descriptor for selectors that keep no behavior space.
inline Point2 no_behavior(const Ensemble&, const ModelRepo&) { return {0.0, 0.0}; }

enum class Split { kValidation, kTest };

inline const ProbMatrix& predictions(const ModelRepo& repo, std::size_t model, Split split) {
  return split == Split::kValidation ? repo.models[model].val_predictions
                                     : repo.models[model].test_predictions;
}

/// Count-weighted mean of member predictions. Members are accumulated in
/// ascending index order, so the result is independent of how the bag was built.
inline ProbMatrix combine_predictions(const Ensemble& e, std::span<const ProbMatrix* const> preds) {
  check_ensemble(e, preds.size());
  const ProbMatrix& first = *preds[e.counts().begin()->first];
  ProbMatrix out(first.rows(), first.cols());
  auto acc = out.data();
  for (const auto& [m, c] : e.counts()) {
    const ProbMatrix& p = *preds[m];
    if (p.rows() != out.rows() || p.cols() != out.cols()) {
      throw ValidationError("combine_predictions: model " + std::to_string(m) +
                            " has a different shape");
    }
    const auto src = p.data();
    const double w = static_cast<double>(c);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
  }
  const double total = static_cast<double>(e.total());
  for (double& v : acc) v /= total;
  return out;
}

inline ProbMatrix combine_predictions(const Ensemble& e, const ModelRepo& repo, Split split) {
  std::vector<const ProbMatrix*> preds(repo.n_models());
  for (std::size_t m = 0; m < repo.n_models(); ++m) preds[m] = &predictions(repo, m, split);
  return combine_predictions(e, preds);
}

inline double ensemble_auc(const Ensemble& e, const ModelRepo& repo, Split split) {
  const auto& labels = split == Split::kValidation ? repo.val_labels : repo.test_labels;
  return roc_auc_multiclass(combine_predictions(e, repo, split), labels);
}

inline EvaluatedEnsemble evaluate(const Ensemble& e, const ModelRepo& repo,
                                  const BehaviorFn& behavior_fn = no_behavior) {
  check_ensemble(e, repo.n_models());
  EvaluatedEnsemble out;
  out.ensemble = e;
  out.val_auc = ensemble_auc(e, repo, Split::kValidation);
  out.test_auc = ensemble_auc(e, repo, Split::kTest);
  out.inference_time_s = ensemble_inference_time(e, repo);
  out.size = ensemble_size(e);
  out.behavior = behavior_fn(e, repo);
  return out;
}

/// Singleton of the model with the highest validation AUC; ties go to the lowest index.
inline Ensemble single_best(const ModelRepo& repo) {
  std::size_t best = 0;
  double best_auc = -1.0;
  for (std::size_t m = 0; m < repo.n_models(); ++m) {
    const double auc = ensemble_auc(Ensemble::singleton(m), repo, Split::kValidation);
    if (auc > best_auc) {
      best_auc = auc;
      best = m;
    }
  }
  return Ensemble::singleton(best);
}

}  // namespace haes
