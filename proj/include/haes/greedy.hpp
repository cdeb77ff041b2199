#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "haes/evaluate.hpp"

namespace haes {

struct GesConfig {
  std::size_t iterations = 100;
};

/// Greedy ensemble selection with replacement, recording every iterate.
///
/// trajectory[0] is the single best model; trajectory[t] adds to trajectory[t-1]
/// the model whose addition gives the highest validation AUC (lowest index on
/// ties). No randomness is involved.
inline std::vector<EvaluatedEnsemble> run_ges(const ModelRepo& repo, const GesConfig& config,
                                              const BehaviorFn& behavior_fn = no_behavior) {
  std::vector<EvaluatedEnsemble> trajectory;
  trajectory.reserve(config.iterations + 1);
  Ensemble current = single_best(repo);
  trajectory.push_back(evaluate(current, repo, behavior_fn));

  for (std::size_t t = 0; t < config.iterations; ++t) {
    std::size_t best_model = 0;
    double best_auc = -1.0;
    for (std::size_t m = 0; m < repo.n_models(); ++m) {
      Ensemble candidate = current;
      candidate.add(m);
      const double auc = ensemble_auc(candidate, repo, Split::kValidation);
      if (auc > best_auc) {
        best_auc = auc;
        best_model = m;
      }
    }
    current.add(best_model);
    trajectory.push_back(evaluate(current, repo, behavior_fn));
  }
  return trajectory;
}

/// The trajectory with repeated count-maps removed (first occurrence kept).
inline std::vector<EvaluatedEnsemble> ges_solution_set(
    const std::vector<EvaluatedEnsemble>& trajectory) {
  std::vector<EvaluatedEnsemble> out;
  std::set<Ensemble> seen;
  for (const auto& e : trajectory) {
    if (seen.insert(e.ensemble).second) out.push_back(e);
  }
  return out;
}

}  // namespace haes
