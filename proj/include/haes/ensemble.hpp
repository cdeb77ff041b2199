#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>

#include "haes/error.hpp"

namespace haes {

/// A bag of model indices; counts act as averaging weights.
///
/// Ordered by model index so iteration, serialization and equality are
/// canonical. Never empty once constructed through the public API.
class Ensemble {
 public:
  using Counts = std::map<std::size_t, std::uint32_t>;

  Ensemble() = default;
  explicit Ensemble(Counts counts) : counts_(std::move(counts)) {
    for (auto it = counts_.begin(); it != counts_.end();) {
      it = it->second == 0 ? counts_.erase(it) : std::next(it);
    }
  }
  Ensemble(std::initializer_list<std::pair<const std::size_t, std::uint32_t>> init)
      : Ensemble(Counts(init)) {}

  static Ensemble singleton(std::size_t model) { return Ensemble(Counts{{model, 1}}); }

  const Counts& counts() const noexcept { return counts_; }
  bool empty() const noexcept { return counts_.empty(); }

  /// Number of distinct members.
  std::size_t size() const noexcept { return counts_.size(); }

  /// Sum of all counts.
  std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& [m, c] : counts_) t += c;
    return t;
  }

  std::uint32_t count(std::size_t model) const {
    auto it = counts_.find(model);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(std::size_t model) const { return counts_.count(model) != 0; }

  void add(std::size_t model, std::uint32_t n = 1) { counts_[model] += n; }

  /// Removes one unit; erases the member when its count reaches zero.
  void remove_one(std::size_t model) {
    auto it = counts_.find(model);
    if (it == counts_.end()) throw ConfigError("remove_one: model not a member");
    if (--it->second == 0) counts_.erase(it);
  }

  /// Largest member index plus one (0 when empty).
  std::size_t index_bound() const noexcept {
    return counts_.empty() ? 0 : counts_.rbegin()->first + 1;
  }

  /// `model:count` pairs, comma separated, ascending by model index.
  std::string serialize() const {
    std::string out;
    for (const auto& [m, c] : counts_) {
      if (!out.empty()) out += ',';
      out += std::to_string(m);
      out += ':';
      out += std::to_string(c);
    }
    return out;
  }

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
  friend auto operator<=>(const Ensemble& a, const Ensemble& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  Counts counts_;
};

/// Throws ConfigError unless `e` is non-empty with every index < n_models.
inline void check_ensemble(const Ensemble& e, std::size_t n_models) {
  if (e.empty()) throw ConfigError("ensemble is empty");
  if (e.index_bound() > n_models) {
    throw ConfigError("ensemble member index " + std::to_string(e.index_bound() - 1) +
                      " out of range for " + std::to_string(n_models) + " models");
  }
}

}  // namespace haes
