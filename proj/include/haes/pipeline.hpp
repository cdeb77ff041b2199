#pragma once

// generate -> run -> report, as callable library functions. The CLI is a thin
// flag parser over these.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "haes/bench.hpp"
#include "haes/evolution.hpp"
#include "haes/greedy.hpp"
#include "haes/repo_io.hpp"

namespace haes {

struct GenerateOptions {
  std::size_t datasets = 1;
  std::size_t models = 20;
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  fs::path out;
  // Template for every generated repo; ids, fold and seed are filled in.
  SyntheticRepoConfig base;
};

/// Writes `<out>/synth_<d>/fold_<f>/manifest.json` for every dataset and fold.
/// Dataset d uses model-pool seed mix(seed, d); folds redraw the instances.
inline std::vector<fs::path> generate_suite(const GenerateOptions& opts) {
  if (opts.datasets == 0 || opts.models == 0 || opts.folds == 0) {
    throw ConfigError("generate: datasets, models and folds must be positive");
  }
  std::vector<fs::path> manifests;
  for (std::size_t d = 0; d < opts.datasets; ++d) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%03zu", d);
    for (std::size_t f = 0; f < opts.folds; ++f) {
      SyntheticRepoConfig cfg = opts.base;
      cfg.dataset_id = name;
      cfg.fold_id = f;
      cfg.n_models = opts.models;
      cfg.seed = mix_seed(opts.seed * 0x100000001b3ULL + d);
      const ModelRepo repo = generate_synthetic(cfg);
      manifests.push_back(write_repo(repo, opts.out / name / ("fold_" + std::to_string(f))));
    }
  }
  return manifests;
}

/// Every `manifest.json` below `root`, sorted.
inline std::vector<fs::path> discover_manifests(const fs::path& root) {
  std::error_code ec;
  if (!fs::exists(root, ec)) throw IoError("no such directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "manifest.json") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SelectorSettings {
  GesConfig ges;
  EvoConfig evo;  // evo.seed is replaced per run
  std::size_t bins = 10;
};

/// Seed for one (dataset, fold, seed, method) run.
inline std::uint64_t run_seed(const std::string& dataset, std::size_t fold, std::uint64_t seed,
                              Method method) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : dataset) h = (h ^ c) * 0x100000001b3ULL;
  h = mix_seed(h ^ mix_seed(fold + 1));
  h = mix_seed(h ^ mix_seed(seed + 0x51ULL));
  return mix_seed(h + static_cast<std::uint64_t>(method));
}

/// Candidate set of one method on one repo: its final population (or GES
/// trajectory) plus the single best model.
inline std::vector<EvaluatedEnsemble> run_method(Method method, const ModelRepo& repo,
                                                 const SelectorSettings& settings,
                                                 std::uint64_t seed) {
  EvoConfig evo = settings.evo;
  evo.seed = seed;
  switch (method) {
    case Method::kGes:
      return ges_solution_set(run_ges(repo, settings.ges));
    case Method::kQoes:
      return solution_set(run_qoes(repo, evo), repo);
    case Method::kQdoes:
      return solution_set(
          run_qdoes(repo, evo, BehaviorSpec::for_variant(QdoVariant::kBase, repo, settings.bins)),
          repo);
    case Method::kSizeQdoes:
      return solution_set(
          run_qdoes(repo, evo, BehaviorSpec::for_variant(QdoVariant::kSize, repo, settings.bins)),
          repo);
    case Method::kInferQdoes:
      return solution_set(
          run_qdoes(repo, evo, BehaviorSpec::for_variant(QdoVariant::kInfer, repo, settings.bins)),
          repo);
  }
  return {};
}

/// Runs `fn(i)` for i in [0, n) on `jobs` threads. The first exception is rethrown.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

struct RunOptions {
  std::vector<fs::path> manifests;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  SelectorSettings settings;
  fs::path out_dir;
  std::size_t jobs = 1;
  bool resume = false;
  bool fail_fast = false;
};

struct RunSummary {
  std::vector<RunResult> results;  // sorted
  std::vector<FrontRow> fronts;
  std::vector<std::string> failures;
  std::size_t computed_groups = 0;
  std::size_t skipped_groups = 0;
};

/// For each (dataset, fold, seed): run every method, normalize over the union
/// of their candidates, and record hypervolume and the best-by-validation
/// ensemble. Writes `results.csv` and `fronts.csv` into `out_dir`.
///
/// With `resume`, groups whose rows for every requested method already exist
/// in `results.csv` are kept as-is; partial groups are recomputed whole because
/// the hypervolume bounds are shared by all methods of a group.
inline RunSummary run_benchmark(const RunOptions& opts) {
  if (opts.methods.empty()) throw ConfigError("run: no methods selected");
  if (opts.seeds.empty()) throw ConfigError("run: no seeds given");
  if (opts.manifests.empty()) throw ConfigError("run: no repos given");

  RunSummary summary;
  std::vector<ModelRepo> repos;
  for (const auto& path : opts.manifests) {
    try {
      repos.push_back(load_repo(path));
    } catch (const Error& e) {
      if (opts.fail_fast) throw;
      summary.failures.push_back(path.string() + ": " + e.what());
    }
  }

  using GroupKey = std::tuple<std::string, std::size_t, std::uint64_t>;
  std::set<GroupKey> done;
  std::vector<RunResult> kept;
  std::vector<FrontRow> kept_fronts;
  const fs::path results_path = opts.out_dir / "results.csv";
  const fs::path fronts_path = opts.out_dir / "fronts.csv";
  if (opts.resume && fs::exists(results_path)) {
    const auto previous = read_results(results_path);
    std::map<GroupKey, std::set<std::string>> have;
    for (const auto& r : previous) have[{r.dataset, r.fold, r.seed}].insert(r.method);
    for (const auto& [key, methods] : have) {
      const bool complete = std::all_of(opts.methods.begin(), opts.methods.end(), [&](Method m) {
        return methods.count(std::string(to_string(m))) != 0;
      });
      if (complete) done.insert(key);
    }
    for (const auto& r : previous) {
      if (done.count({r.dataset, r.fold, r.seed})) kept.push_back(r);
    }
    if (fs::exists(fronts_path)) {
      for (auto& f : read_fronts(fronts_path)) {
        if (done.count({f.dataset, f.fold, f.seed})) kept_fronts.push_back(std::move(f));
      }
    }
  }

  struct Group {
    const ModelRepo* repo;
    std::uint64_t seed;
  };
  std::vector<Group> groups;
  for (const auto& repo : repos) {
    for (std::uint64_t s : opts.seeds) {
      if (done.count({repo.dataset_id, repo.fold_id, s})) {
        ++summary.skipped_groups;
        continue;
      }
      groups.push_back({&repo, s});
    }
  }

  const std::size_t k = opts.methods.size();
  std::vector<std::vector<EvaluatedEnsemble>> sets(groups.size() * k);
  parallel_for(sets.size(), opts.jobs, [&](std::size_t task) {
    const Group& g = groups[task / k];
    const Method m = opts.methods[task % k];
    sets[task] = run_method(m, *g.repo, opts.settings,
                            run_seed(g.repo->dataset_id, g.repo->fold_id, g.seed, m));
  });

  summary.results = std::move(kept);
  summary.fronts = std::move(kept_fronts);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    std::map<std::string, std::vector<EvaluatedEnsemble>> by_method;
    for (std::size_t j = 0; j < k; ++j) {
      by_method[std::string(to_string(opts.methods[j]))] = std::move(sets[gi * k + j]);
    }
    const MethodFronts mf = method_fronts(by_method);
    for (const auto& [method, set] : by_method) {
      const EvaluatedEnsemble best = best_by_validation(set, mf.bounds);
      const ParetoFront& front = mf.fronts.at(method);
      summary.results.push_back({g.repo->dataset_id, g.repo->fold_id, g.seed, method,
                                 mf.hypervolume.at(method), best.val_auc, best.test_auc,
                                 best.inference_time_s, best.size, front.size()});
      for (const auto& f : front) {
        summary.fronts.push_back({method, g.repo->dataset_id, g.repo->fold_id, g.seed,
                                  f.solution.test_auc, f.solution.inference_time_s, f.point,
                                  f.solution.ensemble.serialize()});
      }
    }
    ++summary.computed_groups;
  }
  sort_results(summary.results);

  if (!opts.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create " + opts.out_dir.string() + ": " + ec.message());
    io::write_text(results_path, results_csv(summary.results));
    io::write_text(fronts_path, fronts_csv(summary.fronts));
  }
  return summary;
}

}  // namespace haes
