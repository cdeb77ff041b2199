// haes: generate synthetic repos, run the ensemble selectors, build reports.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "haes/haes.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

int cmd_generate(const haes::GenerateOptions& opts) {
  const auto manifests = haes::generate_suite(opts);
  std::cout << "wrote " << manifests.size() << " manifests under " << opts.out.string() << "\n";
  return 0;
}

int cmd_run(haes::RunOptions opts, const std::vector<std::string>& repo_dirs,
            const std::vector<std::string>& method_names) {
  for (const auto& dir : repo_dirs) {
    for (auto& m : haes::discover_manifests(dir)) opts.manifests.push_back(std::move(m));
  }
  if (!method_names.empty()) {
    opts.methods.clear();
    for (const auto& name : method_names) {
      const auto m = haes::parse_method(name);
      if (!m) throw haes::ConfigError("unknown method '" + name + "'");
      opts.methods.push_back(*m);
    }
  }
  const auto summary = haes::run_benchmark(opts);
  for (const auto& f : summary.failures) std::cerr << "error: " << f << "\n";
  std::cout << "computed " << summary.computed_groups << " groups, skipped "
            << summary.skipped_groups << ", " << summary.results.size() << " rows in "
            << (opts.out_dir / "results.csv").string() << "\n";
  return summary.failures.empty() ? 0 : kRuntimeFailure;
}

int cmd_report(const std::string& results, const std::string& out, double alpha, bool svg) {
  const auto rows = haes::read_results(results);
  const auto report = haes::build_report(rows, alpha);
  if (!report.notice.empty()) std::cerr << "notice: " << report.notice << "\n";
  for (const auto& p : haes::emit_report(report, out, svg)) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-aware post hoc ensemble selection benchmark"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a TOML/INI run-config file");

  // generate
  haes::GenerateOptions gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a synthetic repo suite");
  generate->add_option("--datasets", gen.datasets, "Number of datasets")->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--models", gen.models, "Models per dataset")->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--folds", gen.folds, "Folds per dataset")->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Suite seed")->required();
  generate->add_option("--out", gen_out, "Output directory")->required();
  generate->add_option("--n-val", gen.base.n_val, "Validation rows")->capture_default_str();
  generate->add_option("--n-test", gen.base.n_test, "Test rows")->capture_default_str();
  generate->add_option("--classes", gen.base.n_classes, "Number of classes")->capture_default_str();
  generate->add_option("--accuracy-lo", gen.base.accuracy_lo)->capture_default_str();
  generate->add_option("--accuracy-hi", gen.base.accuracy_hi)->capture_default_str();
  generate->add_option("--correlation", gen.base.correlation)->capture_default_str();
  generate->add_option("--time-lo", gen.base.time_lo_s, "Fastest model time (s)")->capture_default_str();
  generate->add_option("--time-hi", gen.base.time_hi_s, "Slowest model time (s)")->capture_default_str();
  generate->add_option("--config-dims", gen.base.config_dims, "Config embedding length (0 = none)")
      ->capture_default_str();

  // run
  haes::RunOptions run;
  std::vector<std::string> repo_dirs, manifests, method_names;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run selectors and write results.csv / fronts.csv");
  run_cmd->add_option("--repos", repo_dirs, "Directories searched for manifest.json");
  run_cmd->add_option("--manifest", manifests, "Explicit manifest paths");
  run_cmd->add_option("--methods", method_names, "Subset of GES,QO-ES,QDO-ES,SIZE-QDO-ES,INFER-QDO-ES")
      ->delimiter(',');
  run_cmd->add_option("--seeds", run.seeds, "Seeds (default 0..9)")->delimiter(',');
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  run_cmd->add_option("--jobs", run.jobs, "Worker threads")->envname("HAES_JOBS")
      ->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_option("--ges-iterations", run.settings.ges.iterations)->capture_default_str();
  run_cmd->add_option("--capacity", run.settings.evo.capacity)->capture_default_str();
  run_cmd->add_option("--budget", run.settings.evo.budget)->capture_default_str();
  run_cmd->add_option("--batch", run.settings.evo.batch)->capture_default_str();
  run_cmd->add_option("--mutation-prob", run.settings.evo.mutation_prob)->capture_default_str();
  run_cmd->add_option("--bins", run.settings.bins, "Behavior grid bins per dimension")
      ->capture_default_str();
  run_cmd->add_flag("--resume", run.resume, "Keep complete groups already in results.csv");
  run_cmd->add_flag("--fail-fast", run.fail_fast, "Abort on the first invalid repo");

  // report
  std::string results_path, report_out;
  double alpha = 0.05;
  bool no_svg = false;
  auto* report = app.add_subcommand("report", "Aggregate results.csv into report files");
  report->add_option("--results", results_path, "results.csv from `run`")->required();
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_option("--alpha", alpha, "Significance level (only 0.05)")->capture_default_str();
  report->add_flag("--no-svg", no_svg, "Skip the SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*generate) {
      gen.out = gen_out;
      return cmd_generate(gen);
    }
    if (*run_cmd) {
      run.out_dir = run_out;
      for (const auto& m : manifests) run.manifests.emplace_back(m);
      if (repo_dirs.empty() && manifests.empty()) {
        std::cerr << "usage error: run needs --repos or --manifest\n";
        return kUsageError;
      }
      return cmd_run(run, repo_dirs, method_names);
    }
    if (*report) {
      if (alpha != 0.05) {
        std::cerr << "usage error: only --alpha 0.05 is supported\n";
        return kUsageError;
      }
      return cmd_report(results_path, report_out, alpha, !no_svg);
    }
  } catch (const haes::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}
