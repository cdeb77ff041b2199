#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "haes/error.hpp"

namespace haes {

/// Dense row-major matrix of class probabilities (one row per instance).
class ProbMatrix {
 public:
  ProbMatrix() = default;
  ProbMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Column j copied out, e.g. as the score vector for a one-vs-rest AUC.
  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  friend bool operator==(const ProbMatrix&, const ProbMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// One base model's cached predictions and cost.
struct ModelEntry {
  std::string model_id;
  double inference_time_s = 0.0;
  std::vector<double> config_features;  // empty when the repo has none
  ProbMatrix val_predictions;
  ProbMatrix test_predictions;

  friend bool operator==(const ModelEntry&, const ModelEntry&) = default;
};

/// One dataset-fold worth of precomputed base-model predictions.
///
/// Immutable once validated; selectors only ever take it by const reference,
/// so it can be shared across worker threads.
struct ModelRepo {
  std::string dataset_id;
  std::size_t fold_id = 0;
  std::size_t n_classes = 0;
  std::vector<int> val_labels;
  std::vector<int> test_labels;
  std::vector<ModelEntry> models;

  std::size_t n_models() const noexcept { return models.size(); }
  std::size_t n_val() const noexcept { return val_labels.size(); }
  std::size_t n_test() const noexcept { return test_labels.size(); }
  bool has_config_features() const noexcept {
    return !models.empty() && !models.front().config_features.empty();
  }

  friend bool operator==(const ModelRepo&, const ModelRepo&) = default;
};

inline constexpr double kRowSumTolerance = 1e-6;

namespace detail {

inline void check_labels(std::span<const int> labels, std::size_t n_classes,
                         const char* split) {
  if (labels.empty()) {
    throw ValidationError(std::string(split) + " labels are empty");
  }
  std::set<int> distinct;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      throw ValidationError(std::string(split) + " label at row " + std::to_string(i) +
                            " is " + std::to_string(y) + ", outside [0, " +
                            std::to_string(n_classes) + ")");
    }
    distinct.insert(y);
  }
  if (distinct.size() < 2) {
    throw ValidationError(std::string(split) + " labels contain a single class");
  }
}

inline void check_matrix(const ProbMatrix& m, std::size_t rows, std::size_t cols,
                         std::size_t model, const char* split) {
  const std::string where = "model " + std::to_string(model) + " " + split + " predictions";
  if (m.rows() != rows || m.cols() != cols) {
    throw ValidationError(where + ": shape " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                          "x" + std::to_string(cols));
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (double p : m.row(i)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError(where + ": row " + std::to_string(i) +
                              " has a probability outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError(where + ": row " + std::to_string(i) + " sums to " +
                            std::to_string(sum));
    }
  }
}

}  // namespace detail

/// Throws ValidationError naming the first violated invariant.
inline void validate_repo(const ModelRepo& repo) {
  if (repo.n_classes < 2) throw ValidationError("n_classes must be >= 2");
  if (repo.models.empty()) throw ValidationError("repo has no models");
  detail::check_labels(repo.val_labels, repo.n_classes, "validation");
  detail::check_labels(repo.test_labels, repo.n_classes, "test");

  const std::size_t feature_len = repo.models.front().config_features.size();
  for (std::size_t m = 0; m < repo.models.size(); ++m) {
    const ModelEntry& e = repo.models[m];
    if (!std::isfinite(e.inference_time_s) || e.inference_time_s <= 0.0) {
      throw ValidationError("model " + std::to_string(m) +
                            ": inference_time_s must be finite and > 0");
    }
    if (e.config_features.size() != feature_len) {
      throw ValidationError("model " + std::to_string(m) +
                            ": config_features length differs from model 0");
    }
    for (double f : e.config_features) {
      if (!std::isfinite(f)) {
        throw ValidationError("model " + std::to_string(m) + ": non-finite config feature");
      }
    }
    detail::check_matrix(e.val_predictions, repo.n_val(), repo.n_classes, m, "validation");
    detail::check_matrix(e.test_predictions, repo.n_test(), repo.n_classes, m, "test");
  }
}

/// Knobs for the desk-scale synthetic model pool.
struct SyntheticRepoConfig {
  std::string dataset_id = "synthetic";
  std::size_t fold_id = 0;
  std::size_t n_models = 20;
  std::size_t n_val = 500;
  std::size_t n_test = 500;
  std::size_t n_classes = 2;
  // Per-model argmax accuracy is spread evenly over this range.
  double accuracy_lo = 0.6;
  double accuracy_hi = 0.9;
  // 0 = independent model errors, 1 = identical models.
  double correlation = 0.5;
  // Inference times are log-uniform over [time_lo_s, time_hi_s].
  double time_lo_s = 1e-3;
  double time_hi_s = 1.0;
  // Length of the per-model config embedding; 0 omits config features.
  std::size_t config_dims = 4;
  // Seeds the model traits (accuracy, time, config). Instance noise is seeded
  // from (seed, fold_id), so folds of one dataset share the same model pool.
  std::uint64_t seed = 0;
};

inline void validate_config(const SyntheticRepoConfig& c) {
  if (c.n_models == 0 || c.n_val == 0 || c.n_test == 0) {
    throw ConfigError("synthetic repo counts must be positive");
  }
  if (c.n_classes < 2) throw ConfigError("n_classes must be >= 2");
  if (c.n_val < c.n_classes || c.n_test < c.n_classes) {
    throw ConfigError("each split needs at least n_classes instances");
  }
  if (!(c.accuracy_lo > 0.5 && c.accuracy_lo <= c.accuracy_hi && c.accuracy_hi < 1.0)) {
    throw ConfigError("accuracy range must be ordered inside (0.5, 1)");
  }
  if (!(c.correlation >= 0.0 && c.correlation <= 1.0)) {
    throw ConfigError("correlation must lie in [0, 1]");
  }
  if (!(c.time_lo_s > 0.0 && c.time_lo_s <= c.time_hi_s && std::isfinite(c.time_hi_s))) {
    throw ConfigError("inference-time range must be ordered and positive");
  }
}

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {

inline std::vector<int> draw_labels(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  // Every class appears at least once so one-vs-rest AUC is defined for all k.
  std::vector<int> labels(n);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(k) - 1);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < k ? static_cast<int>(i) : cls(rng);
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

inline void softmax_row(std::span<double> row) {
  const double mx = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

// Predictions of every model on one split. Shared and private standard normal
// logit noise are mixed convexly, then rescaled to unit variance.
inline std::vector<ProbMatrix> draw_split(std::span<const int> labels, std::size_t k,
                                          std::span<const double> signal, double rho,
                                          std::mt19937_64& rng) {
  const std::size_t n = labels.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> shared(n * k);
  for (double& z : shared) z = gauss(rng);

  const double scale = 1.0 / std::sqrt(rho * rho + (1.0 - rho) * (1.0 - rho));
  std::vector<ProbMatrix> out;
  out.reserve(signal.size());
  for (double s : signal) {
    ProbMatrix m(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = m.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        // The private draw is always consumed so rho does not shift the stream.
        const double priv = gauss(rng);
        const double noise = (rho * shared[i * k + c] + (1.0 - rho) * priv) * scale;
        row[c] = (static_cast<int>(c) == labels[i] ? s : 0.0) + noise;
      }
      softmax_row(row);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace detail

/// Deterministic synthetic repo: same config, same bytes.
inline ModelRepo generate_synthetic(const SyntheticRepoConfig& config) {
  validate_config(config);
  const std::size_t n_models = config.n_models;

  std::mt19937_64 trait_rng(mix_seed(config.seed));
  std::vector<std::size_t> order(n_models);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), trait_rng);

  // Argmax accuracy a with unit-variance logit noise needs a margin of
  // sqrt(2) * Phi^-1(a) in the binary case.
  const boost::math::normal standard;
  auto margin = [&](double acc) { return std::sqrt(2.0) * boost::math::quantile(standard, acc); };
  const double rho = config.correlation;
  const double shared_margin = margin(0.5 * (config.accuracy_lo + config.accuracy_hi));

  std::vector<double> signal(n_models);
  for (std::size_t m = 0; m < n_models; ++m) {
    const double t = n_models == 1 ? 0.5
                                   : static_cast<double>(order[m]) /
                                         static_cast<double>(n_models - 1);
    const double acc = config.accuracy_lo + t * (config.accuracy_hi - config.accuracy_lo);
    signal[m] = rho * shared_margin + (1.0 - rho) * margin(acc);
  }

  ModelRepo repo;
  repo.dataset_id = config.dataset_id;
  repo.fold_id = config.fold_id;
  repo.n_classes = config.n_classes;
  repo.models.resize(n_models);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double log_lo = std::log(config.time_lo_s);
  const double log_hi = std::log(config.time_hi_s);
  for (std::size_t m = 0; m < n_models; ++m) {
    ModelEntry& e = repo.models[m];
    e.model_id = "m" + std::to_string(m);
    e.inference_time_s = std::exp(log_lo + unit(trait_rng) * (log_hi - log_lo));
    e.config_features.resize(config.config_dims);
    for (double& f : e.config_features) f = gauss(trait_rng);
  }

  std::mt19937_64 data_rng(mix_seed(mix_seed(config.seed) ^ (config.fold_id + 1)));
  repo.val_labels = detail::draw_labels(config.n_val, config.n_classes, data_rng);
  repo.test_labels = detail::draw_labels(config.n_test, config.n_classes, data_rng);
  auto val = detail::draw_split(repo.val_labels, config.n_classes, signal, rho, data_rng);
  auto test = detail::draw_split(repo.test_labels, config.n_classes, signal, rho, data_rng);
  for (std::size_t m = 0; m < n_models; ++m) {
    repo.models[m].val_predictions = std::move(val[m]);
    repo.models[m].test_predictions = std::move(test[m]);
  }
  return repo;
}

}  // namespace haes
