#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "haes/evaluate.hpp"
#include "haes/metrics.hpp"

namespace haes {

/// Indices of the non-dominated points (minimization), ascending by first
/// objective. Among points with identical coordinates only the one ordered
/// first by `tie_less` (then by index) survives.
template <class TieLess>
std::vector<std::size_t> nondominated_indices(std::span<const Point2> points, TieLess tie_less) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
    if (points[a][1] != points[b][1]) return points[a][1] < points[b][1];
    if (tie_less(a, b)) return true;
    if (tie_less(b, a)) return false;
    return a < b;
  });
  std::vector<std::size_t> kept;
  double best_y = std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    if (points[i][1] < best_y) {
      kept.push_back(i);
      best_y = points[i][1];
    }
  }
  return kept;
}

inline std::vector<std::size_t> nondominated_indices(std::span<const Point2> points) {
  return nondominated_indices(points, [](std::size_t, std::size_t) { return false; });
}

struct FrontEntry {
  EvaluatedEnsemble solution;
  Point2 point{};
};

using ParetoFront = std::vector<FrontEntry>;

/// Non-dominated subset of `candidates` under the matching objective `points`.
/// Duplicate points keep the lexicographically smaller serialized ensemble.
inline ParetoFront pareto_front(std::span<const EvaluatedEnsemble> candidates,
                                std::span<const Point2> points) {
  if (candidates.size() != points.size()) throw ConfigError("pareto_front: size mismatch");
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw ConfigError("pareto_front: non-finite objective");
    }
  }
  std::vector<std::string> keys;
  keys.reserve(candidates.size());
  for (const auto& c : candidates) keys.push_back(c.ensemble.serialize());
  const auto kept =
      nondominated_indices(points, [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  ParetoFront front;
  front.reserve(kept.size());
  for (std::size_t i : kept) front.push_back({candidates[i], points[i]});
  return front;
}

/// Exact dominated area of a 2D point set w.r.t. `ref` (minimization).
inline double hypervolume_2d(std::span<const Point2> points, const Point2& ref = {1.0, 1.0}) {
  for (const auto& p : points) {
    if (p[0] > ref[0] || p[1] > ref[1]) {
      throw ConfigError("hypervolume_2d: point exceeds the reference point");
    }
  }
  std::vector<Point2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  double area = 0.0;
  double ceiling = ref[1];
  for (const auto& p : sorted) {
    if (p[1] < ceiling) {
      area += (ref[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return area;
}

/// Monte Carlo estimate of the same area: the dominated fraction of uniform
/// samples over [0, ref], times the box area.
inline double hv_monte_carlo(std::span<const Point2> points, const Point2& ref,
                             std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ConfigError("hv_monte_carlo: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, ref[0]);
  std::uniform_real_distribution<double> uy(0.0, ref[1]);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = ux(rng);
    const double y = uy(rng);
    for (const auto& p : points) {
      if (p[0] <= x && p[1] <= y) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples) * ref[0] * ref[1];
}

struct MethodFronts {
  NormalizationBounds bounds;
  std::map<std::string, ParetoFront> fronts;
  std::map<std::string, double> hypervolume;
};

/// Joint min-max bounds over every method's candidates, then per-method
/// Pareto filtering and hypervolume at reference (1,1).
inline MethodFronts method_fronts(
    const std::map<std::string, std::vector<EvaluatedEnsemble>>& solution_sets) {
  if (solution_sets.empty()) throw ConfigError("method_hypervolume: no methods");
  std::vector<ObjectivePoint> all;
  for (const auto& [method, set] : solution_sets) {
    if (set.empty()) throw ConfigError("method_hypervolume: empty solution set for " + method);
    for (const auto& e : set) all.push_back(e.objectives());
  }
  MethodFronts out;
  out.bounds = bounds_of(all);
  for (const auto& [method, set] : solution_sets) {
    std::vector<ObjectivePoint> objs;
    objs.reserve(set.size());
    for (const auto& e : set) objs.push_back(e.objectives());
    const auto points = minmax_normalize(objs, out.bounds);
    ParetoFront front = pareto_front(set, points);
    std::vector<Point2> front_points;
    for (const auto& f : front) front_points.push_back(f.point);
    out.hypervolume[method] = hypervolume_2d(front_points, {1.0, 1.0});
    out.fronts[method] = std::move(front);
  }
  return out;
}

inline std::map<std::string, double> method_hypervolume(
    const std::map<std::string, std::vector<EvaluatedEnsemble>>& solution_sets) {
  return method_fronts(solution_sets).hypervolume;
}

}  // namespace haes
