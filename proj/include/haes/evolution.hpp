#pragma once

// Population-based ensemble selection.
//
// QO-ES keeps the `capacity` best ensembles by validation AUC. QDO-ES keeps one
// elite per cell of a 2D behavior grid instead; the hardware-aware variants put
// ensemble size or inference time on the first grid axis so the surviving
// population spans a range of predictive cost.
//
// Random draws all come from one std::mt19937_64 per run, consumed in this
// order for every offspring: parent a, parent b, crossover coins (one per
// union member, ascending index), mutation coin, mutation move, move operands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "haes/evaluate.hpp"

namespace haes {

enum class Descriptor {
  kConfigSimilarity,
  kEnsembleSize,
  kInferenceTime,
  kPredictionDiversity,
};

enum class QdoVariant { kBase, kSize, kInfer };

inline const char* to_string(QdoVariant v) {
  switch (v) {
    case QdoVariant::kBase: return "QDO-BASE";
    case QdoVariant::kSize: return "SIZE-QDO";
    case QdoVariant::kInfer: return "INFER-QDO";
  }
  return "?";
}

inline double describe(Descriptor d, const Ensemble& e, const ModelRepo& repo) {
  switch (d) {
    case Descriptor::kConfigSimilarity: return config_similarity(e, repo);
    case Descriptor::kEnsembleSize: return static_cast<double>(ensemble_size(e));
    case Descriptor::kInferenceTime: return ensemble_inference_time(e, repo);
    case Descriptor::kPredictionDiversity: return prediction_diversity(e, repo);
  }
  return 0.0;
}

/// One axis of the behavior grid.
struct BehaviorDim {
  Descriptor descriptor = Descriptor::kPredictionDiversity;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 10;
  bool log_scale = false;

  /// Values at or below `lo` land in bin 0, at or above `hi` in the last bin.
  std::size_t bin(double v) const {
    double a = lo, b = hi, x = v;
    if (log_scale) {
      a = std::log(lo);
      b = std::log(hi);
      x = v > 0.0 ? std::log(v) : a;
    }
    if (!(b > a)) return 0;
    const double t = (x - a) / (b - a);
    if (!(t > 0.0)) return 0;
    const auto idx = static_cast<std::size_t>(std::floor(t * static_cast<double>(bins)));
    return std::min(idx, bins - 1);
  }
};

struct BehaviorSpec {
  QdoVariant variant = QdoVariant::kInfer;
  BehaviorDim dim1;
  BehaviorDim dim2;

  /// Default grid: 10x10, dim2 = prediction diversity on [0,1]; dim1 is
  /// config similarity on [0,1], ensemble size on [1,25], or inference time
  /// on [fastest model, all models] with log spacing.
  static BehaviorSpec for_variant(QdoVariant variant, const ModelRepo& repo,
                                  std::size_t bins = 10) {
    BehaviorSpec s;
    s.variant = variant;
    s.dim2 = {Descriptor::kPredictionDiversity, 0.0, 1.0, bins, false};
    switch (variant) {
      case QdoVariant::kBase:
        s.dim1 = {Descriptor::kConfigSimilarity, 0.0, 1.0, bins, false};
        break;
      case QdoVariant::kSize:
        s.dim1 = {Descriptor::kEnsembleSize, 1.0, 25.0, bins, false};
        break;
      case QdoVariant::kInfer: {
        double lo = repo.models.at(0).inference_time_s;
        double sum = 0.0;
        for (const auto& m : repo.models) {
          lo = std::min(lo, m.inference_time_s);
          sum += m.inference_time_s;
        }
        s.dim1 = {Descriptor::kInferenceTime, lo, sum, bins, true};
        break;
      }
    }
    return s;
  }

  void validate() const {
    const Descriptor expected = variant == QdoVariant::kBase   ? Descriptor::kConfigSimilarity
                                : variant == QdoVariant::kSize ? Descriptor::kEnsembleSize
                                                               : Descriptor::kInferenceTime;
    if (dim1.descriptor != expected) {
      throw ConfigError(std::string("behavior spec: dim1 does not match ") + to_string(variant));
    }
    if (dim2.descriptor != Descriptor::kPredictionDiversity) {
      throw ConfigError("behavior spec: dim2 must be prediction diversity");
    }
    for (const BehaviorDim* d : {&dim1, &dim2}) {
      if (d->bins < 2) throw ConfigError("behavior spec: need at least 2 bins per dimension");
      if (!(d->lo <= d->hi)) throw ConfigError("behavior spec: bounds must be ordered");
      if (d->log_scale && !(d->lo > 0.0)) {
        throw ConfigError("behavior spec: log-scaled bounds must be positive");
      }
    }
  }

  Point2 describe(const Ensemble& e, const ModelRepo& repo) const {
    return {haes::describe(dim1.descriptor, e, repo), haes::describe(dim2.descriptor, e, repo)};
  }

  BehaviorFn behavior_fn() const {
    return [spec = *this](const Ensemble& e, const ModelRepo& repo) {
      return spec.describe(e, repo);
    };
  }
};

enum class InsertOutcome { kNewElite, kReplaced, kRejected };

struct InsertionRecord {
  std::size_t cell = 0;
  double val_auc = 0.0;
  InsertOutcome outcome = InsertOutcome::kRejected;
};

using InsertionLog = std::vector<InsertionRecord>;

/// MAP-Elites style grid holding at most one elite per cell.
class BehaviorArchive {
 public:
  BehaviorArchive(BehaviorDim dim1, BehaviorDim dim2)
      : dim1_(dim1), dim2_(dim2), cells_(dim1.bins * dim2.bins) {}

  const BehaviorDim& dim1() const noexcept { return dim1_; }
  const BehaviorDim& dim2() const noexcept { return dim2_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  std::size_t cell_of(const Point2& behavior) const {
    return dim1_.bin(behavior[0]) * dim2_.bins + dim2_.bin(behavior[1]);
  }

  const std::optional<EvaluatedEnsemble>& at(std::size_t cell) const { return cells_.at(cell); }

  /// Strict improvement replaces the incumbent; ties keep it.
  InsertOutcome insert(const EvaluatedEnsemble& candidate) {
    if (!std::isfinite(candidate.behavior[0]) || !std::isfinite(candidate.behavior[1])) {
      throw ConfigError("archive_insert: non-finite behavior descriptor");
    }
    auto& slot = cells_[cell_of(candidate.behavior)];
    if (!slot) {
      slot = candidate;
      ++occupied_;
      return InsertOutcome::kNewElite;
    }
    if (candidate.val_auc > slot->val_auc) {
      slot = candidate;
      return InsertOutcome::kReplaced;
    }
    return InsertOutcome::kRejected;
  }

  std::size_t occupied() const noexcept { return occupied_; }

  /// Elites in cell order.
  std::vector<EvaluatedEnsemble> elites() const {
    std::vector<EvaluatedEnsemble> out;
    out.reserve(occupied_);
    for (const auto& c : cells_) {
      if (c) out.push_back(*c);
    }
    return out;
  }

  /// Distinct dim1 bins with at least one elite.
  std::size_t occupied_dim1_bins() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < dim1_.bins; ++i) {
      for (std::size_t j = 0; j < dim2_.bins; ++j) {
        if (cells_[i * dim2_.bins + j]) {
          ++n;
          break;
        }
      }
    }
    return n;
  }

 private:
  BehaviorDim dim1_;
  BehaviorDim dim2_;
  std::vector<std::optional<EvaluatedEnsemble>> cells_;
  std::size_t occupied_ = 0;
};

inline InsertOutcome archive_insert(BehaviorArchive& archive, const EvaluatedEnsemble& candidate) {
  return archive.insert(candidate);
}

struct EvoConfig {
  std::size_t capacity = 50;
  // Offspring evaluations; the initial singleton scan is not counted.
  std::size_t budget = 2000;
  std::size_t batch = 20;
  double mutation_prob = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (capacity == 0 || batch == 0) throw ConfigError("evo config: capacity and batch must be positive");
    if (budget > 0 && batch > budget) throw ConfigError("evo config: batch exceeds budget");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
      throw ConfigError("evo config: mutation_prob must lie in [0,1]");
    }
  }
};

using Rng = std::mt19937_64;

namespace detail {

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::size_t nth_member(const Ensemble& e, std::size_t n) {
  auto it = e.counts().begin();
  std::advance(it, static_cast<std::ptrdiff_t>(n));
  return it->first;
}

}  // namespace detail

enum class MutationMove { kIncrement, kDecrement, kSwap };

/// Applies one move: increment a random model, decrement a random member, or
/// move one unit from a random member to a random non-member. Moves that would
/// empty the ensemble (or a swap with no non-member) fall back to increment.
inline Ensemble mutate(const Ensemble& e, std::size_t n_models, Rng& rng,
                       MutationMove* applied = nullptr) {
  check_ensemble(e, n_models);
  auto move = static_cast<MutationMove>(detail::uniform_index(rng, 3));
  if (move == MutationMove::kDecrement && e.total() == 1) move = MutationMove::kIncrement;
  if (move == MutationMove::kSwap && e.size() == n_models) move = MutationMove::kIncrement;

  Ensemble out = e;
  switch (move) {
    case MutationMove::kIncrement:
      out.add(detail::uniform_index(rng, n_models));
      break;
    case MutationMove::kDecrement:
      out.remove_one(detail::nth_member(e, detail::uniform_index(rng, e.size())));
      break;
    case MutationMove::kSwap: {
      const std::size_t from = detail::nth_member(e, detail::uniform_index(rng, e.size()));
      std::vector<std::size_t> outside;
      outside.reserve(n_models - e.size());
      for (std::size_t m = 0; m < n_models; ++m) {
        if (!e.contains(m)) outside.push_back(m);
      }
      const std::size_t to = outside[detail::uniform_index(rng, outside.size())];
      out.remove_one(from);
      out.add(to);
      break;
    }
  }
  if (applied) *applied = move;
  return out;
}

/// Uniform crossover over the union of supports; an empty child falls back to `a`.
inline Ensemble crossover(const Ensemble& a, const Ensemble& b, Rng& rng) {
  std::set<std::size_t> members;
  for (const auto& [m, c] : a.counts()) members.insert(m);
  for (const auto& [m, c] : b.counts()) members.insert(m);
  std::bernoulli_distribution coin(0.5);
  Ensemble::Counts child;
  for (std::size_t m : members) {
    const std::uint32_t c = coin(rng) ? a.count(m) : b.count(m);
    if (c > 0) child[m] = c;
  }
  if (child.empty()) return a;
  return Ensemble(std::move(child));
}

namespace detail {

// Survivor order: higher val AUC, then lower inference time, then smaller ensemble order.
inline bool ranks_before(const EvaluatedEnsemble& x, const EvaluatedEnsemble& y) {
  if (x.val_auc != y.val_auc) return x.val_auc > y.val_auc;
  if (x.inference_time_s != y.inference_time_s) return x.inference_time_s < y.inference_time_s;
  return x.ensemble < y.ensemble;
}

inline std::vector<EvaluatedEnsemble> best_singletons(const ModelRepo& repo, std::size_t capacity,
                                                      const BehaviorFn& behavior_fn) {
  std::vector<EvaluatedEnsemble> all;
  all.reserve(repo.n_models());
  for (std::size_t m = 0; m < repo.n_models(); ++m) {
    all.push_back(evaluate(Ensemble::singleton(m), repo, behavior_fn));
  }
  std::sort(all.begin(), all.end(), ranks_before);
  all.resize(std::min(capacity, all.size()));
  return all;
}

inline Ensemble make_offspring(const std::vector<EvaluatedEnsemble>& parents, std::size_t n_models,
                               double mutation_prob, Rng& rng) {
  const Ensemble& a = parents[uniform_index(rng, parents.size())].ensemble;
  const Ensemble& b = parents[uniform_index(rng, parents.size())].ensemble;
  Ensemble child = crossover(a, b, rng);
  if (std::bernoulli_distribution(mutation_prob)(rng)) child = mutate(child, n_models, rng);
  return child;
}

}  // namespace detail

/// Quality-only evolution; returns the final population, best first.
inline std::vector<EvaluatedEnsemble> run_qoes(const ModelRepo& repo, const EvoConfig& config) {
  config.validate();
  Rng rng(config.seed);
  auto population = detail::best_singletons(repo, config.capacity, no_behavior);

  std::size_t used = 0;
  while (used < config.budget) {
    const std::size_t n = std::min(config.batch, config.budget - used);
    std::vector<EvaluatedEnsemble> merged = population;
    std::set<Ensemble> present;
    for (const auto& p : population) present.insert(p.ensemble);
    for (std::size_t i = 0; i < n; ++i) {
      Ensemble child = detail::make_offspring(population, repo.n_models(), config.mutation_prob, rng);
      auto evaluated = evaluate(child, repo);
      if (present.insert(child).second) merged.push_back(std::move(evaluated));
    }
    used += n;
    std::sort(merged.begin(), merged.end(), detail::ranks_before);
    merged.resize(std::min(config.capacity, merged.size()));
    population = std::move(merged);
  }
  return population;
}

/// Runs QDO-ES and also hands back the archive (for occupancy checks).
/// Every insertion attempt is appended to `log` when one is given.
inline BehaviorArchive run_qdoes_archive(const ModelRepo& repo, const EvoConfig& config,
                                         const BehaviorSpec& spec, InsertionLog* log = nullptr) {
  config.validate();
  spec.validate();
  if (spec.variant == QdoVariant::kBase && !repo.has_config_features()) {
    throw ConfigError("QDO-BASE needs config_features, which this repo lacks");
  }
  const BehaviorFn behavior_fn = spec.behavior_fn();
  BehaviorArchive archive(spec.dim1, spec.dim2);
  auto insert = [&](const EvaluatedEnsemble& e) {
    const InsertOutcome outcome = archive.insert(e);
    if (log) log->push_back({archive.cell_of(e.behavior), e.val_auc, outcome});
  };
  for (const auto& s : detail::best_singletons(repo, config.capacity, behavior_fn)) insert(s);

  Rng rng(config.seed);
  std::size_t used = 0;
  while (used < config.budget) {
    const std::size_t n = std::min(config.batch, config.budget - used);
    const auto parents = archive.elites();
    std::vector<EvaluatedEnsemble> offspring;
    offspring.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Ensemble child = detail::make_offspring(parents, repo.n_models(), config.mutation_prob, rng);
      offspring.push_back(evaluate(child, repo, behavior_fn));
    }
    for (const auto& o : offspring) insert(o);
    used += n;
  }
  return archive;
}

/// Quality-diversity evolution; returns every elite of the final archive.
inline std::vector<EvaluatedEnsemble> run_qdoes(const ModelRepo& repo, const EvoConfig& config,
                                                const BehaviorSpec& spec,
                                                InsertionLog* log = nullptr) {
  return run_qdoes_archive(repo, config, spec, log).elites();
}

/// Final population plus the single best model, deduplicated by count-map.
inline std::vector<EvaluatedEnsemble> solution_set(const std::vector<EvaluatedEnsemble>& population,
                                                   const ModelRepo& repo) {
  std::vector<EvaluatedEnsemble> out;
  std::set<Ensemble> seen;
  for (const auto& e : population) {
    if (seen.insert(e.ensemble).second) out.push_back(e);
  }
  const Ensemble best = single_best(repo);
  if (seen.insert(best).second) out.push_back(evaluate(best, repo));
  return out;
}

}  // namespace haes
