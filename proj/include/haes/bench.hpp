#pragma once

// Benchmark bookkeeping: per-run result rows, best-by-validation extraction,
// cross-dataset aggregation and the report files.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "haes/error.hpp"
#include "haes/evaluate.hpp"
#include "haes/pareto.hpp"
#include "haes/repo_io.hpp"
#include "haes/stats.hpp"

namespace haes {

enum class Method { kGes, kQoes, kQdoes, kSizeQdoes, kInferQdoes };

inline constexpr std::array<Method, 5> kAllMethods = {Method::kGes, Method::kQoes, Method::kQdoes,
                                                      Method::kSizeQdoes, Method::kInferQdoes};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kGes: return "GES";
    case Method::kQoes: return "QO-ES";
    case Method::kQdoes: return "QDO-ES";
    case Method::kSizeQdoes: return "SIZE-QDO-ES";
    case Method::kInferQdoes: return "INFER-QDO-ES";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

/// Position of a method name in the canonical order; unknown names sort last.
inline std::size_t method_order(std::string_view name) {
  const auto m = parse_method(name);
  return m ? static_cast<std::size_t>(*m) : kAllMethods.size();
}

struct RunResult {
  std::string dataset;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  std::string method;
  double hypervolume = 0.0;
  double best_val_auc = 0.0;
  double best_test_auc = 0.0;
  double best_infer_time_s = 0.0;
  std::size_t best_size = 0;
  std::size_t front_size = 0;

  auto key() const { return std::make_tuple(dataset, fold, seed, method_order(method), method); }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

inline void sort_results(std::vector<RunResult>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const RunResult& a, const RunResult& b) { return a.key() < b.key(); });
}

inline constexpr std::string_view kResultsHeader =
    "dataset,fold,seed,method,hypervolume,best_val_auc,best_test_auc,best_infer_time_s,best_size,"
    "front_size";

inline std::string results_csv(std::vector<RunResult> rows) {
  sort_results(rows);
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.dataset + ',' + std::to_string(r.fold) + ',' + std::to_string(r.seed) + ',' +
           r.method + ',' + io::format_double(r.hypervolume) + ',' +
           io::format_double(r.best_val_auc) + ',' + io::format_double(r.best_test_auc) + ',' +
           io::format_double(r.best_infer_time_s) + ',' + std::to_string(r.best_size) + ',' +
           std::to_string(r.front_size) + '\n';
  }
  return out;
}

inline std::vector<RunResult> read_results(const fs::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty() || lines[0] != kResultsHeader) {
    throw IoError(path.string() + ": missing or unexpected results header");
  }
  auto to_uint = [&](std::string_view s, const std::string& where) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw IoError(where + ": bad integer '" + std::string(s) + "'");
    }
    return v;
  };
  std::vector<RunResult> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const auto cells = io::split_commas(lines[i]);
    if (cells.size() != 10) throw IoError(where + ": expected 10 columns");
    RunResult r;
    r.dataset = std::string(cells[0]);
    r.fold = to_uint(cells[1], where);
    r.seed = to_uint(cells[2], where);
    r.method = std::string(cells[3]);
    if (!parse_method(r.method)) throw IoError(where + ": unknown method '" + r.method + "'");
    r.hypervolume = io::parse_double(cells[4], where);
    r.best_val_auc = io::parse_double(cells[5], where);
    r.best_test_auc = io::parse_double(cells[6], where);
    r.best_infer_time_s = io::parse_double(cells[7], where);
    r.best_size = to_uint(cells[8], where);
    r.front_size = to_uint(cells[9], where);
    if (!(r.hypervolume >= 0.0 && r.hypervolume <= 1.0)) {
      throw IoError(where + ": hypervolume outside [0,1]");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// One row of the Pareto-front export.
struct FrontRow {
  std::string method;
  std::string dataset;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  double test_auc = 0.0;
  double inference_time_s = 0.0;
  Point2 normalized{};
  std::string ensemble;

  auto key() const {
    return std::make_tuple(dataset, fold, seed, method_order(method), normalized[0], normalized[1],
                           ensemble);
  }
};

inline constexpr std::string_view kFrontsHeader =
    "method,dataset,fold,seed,test_auc,inference_time_s,norm_obj1,norm_obj2,ensemble";

inline std::string fronts_csv(std::vector<FrontRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const FrontRow& a, const FrontRow& b) { return a.key() < b.key(); });
  std::string out(kFrontsHeader);
  out += '\n';
  for (const auto& r : rows) {
    // The ensemble column itself contains commas, so it is quoted.
    out += r.method + ',' + r.dataset + ',' + std::to_string(r.fold) + ',' +
           std::to_string(r.seed) + ',' + io::format_double(r.test_auc) + ',' +
           io::format_double(r.inference_time_s) + ',' + io::format_double(r.normalized[0]) + ',' +
           io::format_double(r.normalized[1]) + ",\"" + r.ensemble + "\"\n";
  }
  return out;
}

inline std::vector<FrontRow> read_fronts(const fs::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty() || lines[0] != kFrontsHeader) {
    throw IoError(path.string() + ": missing or unexpected fronts header");
  }
  std::vector<FrontRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::string_view line = lines[i];
    const std::size_t quote = line.find('"');
    if (quote == std::string_view::npos || line.back() != '"') {
      throw IoError(where + ": ensemble column must be quoted");
    }
    const auto cells = io::split_commas(line.substr(0, quote));
    if (cells.size() != 9) throw IoError(where + ": expected 9 columns");
    FrontRow r;
    r.method = std::string(cells[0]);
    r.dataset = std::string(cells[1]);
    r.fold = static_cast<std::size_t>(io::parse_double(cells[2], where));
    r.seed = static_cast<std::uint64_t>(io::parse_double(cells[3], where));
    r.test_auc = io::parse_double(cells[4], where);
    r.inference_time_s = io::parse_double(cells[5], where);
    r.normalized = {io::parse_double(cells[6], where), io::parse_double(cells[7], where)};
    r.ensemble = std::string(line.substr(quote + 1, line.size() - quote - 2));
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Among the Pareto-optimal members of `set` (objectives normalized by
/// `bounds`), the highest validation AUC; ties go to lower inference time,
/// then to the lexicographically smaller serialized ensemble.
inline EvaluatedEnsemble best_by_validation(const std::vector<EvaluatedEnsemble>& set,
                                            const NormalizationBounds& bounds) {
  if (set.empty()) throw ConfigError("best_by_validation: empty solution set");
  std::vector<ObjectivePoint> objs;
  for (const auto& e : set) objs.push_back(e.objectives());
  const ParetoFront front = pareto_front(set, minmax_normalize(objs, bounds));
  const EvaluatedEnsemble* best = nullptr;
  std::string best_key;
  for (const auto& f : front) {
    const auto& e = f.solution;
    std::string key = e.ensemble.serialize();
    const bool better =
        best == nullptr || e.val_auc > best->val_auc ||
        (e.val_auc == best->val_auc &&
         (e.inference_time_s < best->inference_time_s ||
          (e.inference_time_s == best->inference_time_s && key < best_key)));
    if (better) {
      best = &e;
      best_key = std::move(key);
    }
  }
  return *best;
}

inline EvaluatedEnsemble best_by_validation(const std::vector<EvaluatedEnsemble>& set) {
  std::vector<ObjectivePoint> objs;
  for (const auto& e : set) objs.push_back(e.objectives());
  if (objs.empty()) throw ConfigError("best_by_validation: empty solution set");
  return best_by_validation(set, bounds_of(objs));
}

/// Mean of `field` over fold x seed cells per (dataset, method). Every dataset
/// must have rows for every method; the error lists the missing cells.
template <class Field>
std::map<std::pair<std::string, std::string>, double> aggregate_mean(
    const std::vector<RunResult>& results, Field field) {
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
  std::set<std::string> datasets;
  std::set<std::string> methods;
  for (const auto& r : results) {
    auto& [sum, n] = acc[{r.dataset, r.method}];
    sum += field(r);
    ++n;
    datasets.insert(r.dataset);
    methods.insert(r.method);
  }
  std::string missing;
  for (const auto& d : datasets) {
    for (const auto& m : methods) {
      if (!acc.count({d, m})) missing += " (" + d + ", " + m + ")";
    }
  }
  if (!missing.empty()) throw ConfigError("aggregate: missing results for" + missing);
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [key, v] : acc) out[key] = v.first / static_cast<double>(v.second);
  return out;
}

inline std::map<std::pair<std::string, std::string>, double> aggregate_hypervolume(
    const std::vector<RunResult>& results) {
  return aggregate_mean(results, [](const RunResult& r) { return r.hypervolume; });
}

struct BenchmarkReport {
  std::vector<std::string> methods;   // canonical order
  std::vector<std::string> datasets;  // sorted
  // [dataset][method]
  std::vector<std::vector<double>> hypervolume;
  std::vector<std::vector<double>> test_auc;
  std::vector<std::vector<double>> infer_time_s;
  std::vector<double> avg_rank_hypervolume;
  std::vector<double> avg_rank_test_auc;
  // Absent when fewer than 2 methods or 2 datasets.
  std::optional<FriedmanResult> friedman;
  std::optional<double> cd;
  std::vector<std::vector<std::string>> groups;
  std::string notice;
};

inline BenchmarkReport build_report(const std::vector<RunResult>& results, double alpha = 0.05) {
  if (alpha != 0.05) throw ConfigError("only alpha = 0.05 is supported");
  if (results.empty()) throw ConfigError("report: no results");
  const auto hv = aggregate_hypervolume(results);
  const auto auc = aggregate_mean(results, [](const RunResult& r) { return r.best_test_auc; });
  const auto time = aggregate_mean(results, [](const RunResult& r) { return r.best_infer_time_s; });

  BenchmarkReport rep;
  std::set<std::string> datasets;
  std::set<std::string> methods;
  for (const auto& r : results) {
    datasets.insert(r.dataset);
    methods.insert(r.method);
  }
  rep.datasets.assign(datasets.begin(), datasets.end());
  rep.methods.assign(methods.begin(), methods.end());
  std::stable_sort(rep.methods.begin(), rep.methods.end(), [](const auto& a, const auto& b) {
    return method_order(a) < method_order(b);
  });

  for (const auto& d : rep.datasets) {
    std::vector<double> hv_row, auc_row, time_row;
    for (const auto& m : rep.methods) {
      hv_row.push_back(hv.at({d, m}));
      auc_row.push_back(auc.at({d, m}));
      time_row.push_back(time.at({d, m}));
    }
    rep.hypervolume.push_back(std::move(hv_row));
    rep.test_auc.push_back(std::move(auc_row));
    rep.infer_time_s.push_back(std::move(time_row));
  }

  const std::size_t k = rep.methods.size();
  const std::size_t n = rep.datasets.size();
  auto average_ranks = [&](const std::vector<std::vector<double>>& m) {
    std::vector<double> avg(k, 0.0);
    for (const auto& row : m) {
      const auto r = midranks_descending(row);
      for (std::size_t j = 0; j < k; ++j) avg[j] += r[j];
    }
    for (double& a : avg) a /= static_cast<double>(n);
    return avg;
  };
  rep.avg_rank_hypervolume = average_ranks(rep.hypervolume);
  rep.avg_rank_test_auc = average_ranks(rep.test_auc);

  if (k < 2) {
    rep.notice = "critical difference skipped: need at least 2 methods";
  } else if (n < 2) {
    rep.notice = "critical difference skipped: need at least 2 datasets";
  } else if (k > kNemenyiQ05.size() + 1) {
    rep.notice = "critical difference skipped: more methods than the tabulated range";
  } else {
    rep.friedman = friedman_test(rep.hypervolume);
    rep.cd = nemenyi_cd(k, n, alpha);
    rep.groups = cd_groups(rep.methods, rep.avg_rank_hypervolume, *rep.cd);
  }
  return rep;
}

namespace detail {

inline std::string svg_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt_fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Rank axis on top, one tick per method, bars joining each CD group.
inline std::string cd_plot_svg(const BenchmarkReport& rep) {
  const std::size_t k = rep.methods.size();
  const double width = 600, left = 60, right = 540, axis_y = 60;
  auto x_of = [&](double rank) {
    return k < 2 ? left : left + (rank - 1.0) / static_cast<double>(k - 1) * (right - left);
  };
  const double height = 120 + 24.0 * static_cast<double>(k + rep.groups.size());
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_fixed(width, 0) +
                  "\" height=\"" + fmt_fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<line x1=\"" + fmt_fixed(left, 1) + "\" y1=\"" + fmt_fixed(axis_y, 1) + "\" x2=\"" +
       fmt_fixed(right, 1) + "\" y2=\"" + fmt_fixed(axis_y, 1) + "\" stroke=\"black\"/>\n";
  for (std::size_t r = 1; r <= k; ++r) {
    const double x = x_of(static_cast<double>(r));
    s += "<line x1=\"" + fmt_fixed(x, 1) + "\" y1=\"" + fmt_fixed(axis_y - 5, 1) + "\" x2=\"" +
         fmt_fixed(x, 1) + "\" y2=\"" + fmt_fixed(axis_y, 1) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt_fixed(x, 1) + "\" y=\"" + fmt_fixed(axis_y - 10, 1) +
         "\" text-anchor=\"middle\">" + std::to_string(r) + "</text>\n";
  }
  if (rep.cd) {
    s += "<text x=\"" + fmt_fixed(left, 1) + "\" y=\"20\">CD = " + fmt_fixed(*rep.cd) + "</text>\n";
  }
  double y = axis_y + 20;
  for (const auto& g : rep.groups) {
    double lo = 1e9, hi = -1e9;
    for (const auto& m : g) {
      const auto j = static_cast<std::size_t>(
          std::find(rep.methods.begin(), rep.methods.end(), m) - rep.methods.begin());
      lo = std::min(lo, x_of(rep.avg_rank_hypervolume[j]));
      hi = std::max(hi, x_of(rep.avg_rank_hypervolume[j]));
    }
    s += "<line x1=\"" + fmt_fixed(lo - 3, 1) + "\" y1=\"" + fmt_fixed(y, 1) + "\" x2=\"" +
         fmt_fixed(hi + 3, 1) + "\" y2=\"" + fmt_fixed(y, 1) + "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    y += 12;
  }
  y += 12;
  for (std::size_t j = 0; j < k; ++j) {
    const double x = x_of(rep.avg_rank_hypervolume[j]);
    s += "<line x1=\"" + fmt_fixed(x, 1) + "\" y1=\"" + fmt_fixed(axis_y, 1) + "\" x2=\"" +
         fmt_fixed(x, 1) + "\" y2=\"" + fmt_fixed(y, 1) + "\" stroke=\"gray\"/>\n";
    s += "<text x=\"" + fmt_fixed(x + 4, 1) + "\" y=\"" + fmt_fixed(y, 1) + "\">" +
         svg_escape(rep.methods[j]) + " (" + fmt_fixed(rep.avg_rank_hypervolume[j], 2) + ")</text>\n";
    y += 24;
  }
  s += "</svg>\n";
  return s;
}

inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Hypervolume distribution per method across datasets.
inline std::string boxplot_svg(const BenchmarkReport& rep) {
  const std::size_t k = rep.methods.size();
  const double height = 320, top = 30, bottom = 260, slot = 110;
  const double width = 60 + slot * static_cast<double>(k);
  auto y_of = [&](double v) { return bottom - v * (bottom - top); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_fixed(width, 0) +
                  "\" height=\"" + fmt_fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<line x1=\"40\" y1=\"" + fmt_fixed(top, 1) + "\" x2=\"40\" y2=\"" + fmt_fixed(bottom, 1) +
       "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    s += "<text x=\"35\" y=\"" + fmt_fixed(y_of(v) + 4, 1) + "\" text-anchor=\"end\">" +
         fmt_fixed(v, 2) + "</text>\n";
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& row : rep.hypervolume) col.push_back(row[j]);
    std::sort(col.begin(), col.end());
    const double q1 = quantile_sorted(col, 0.25), med = quantile_sorted(col, 0.5),
                 q3 = quantile_sorted(col, 0.75);
    const double cx = 60 + slot * (static_cast<double>(j) + 0.5);
    s += "<line x1=\"" + fmt_fixed(cx, 1) + "\" y1=\"" + fmt_fixed(y_of(col.front()), 1) +
         "\" x2=\"" + fmt_fixed(cx, 1) + "\" y2=\"" + fmt_fixed(y_of(col.back()), 1) +
         "\" stroke=\"black\"/>\n";
    s += "<rect x=\"" + fmt_fixed(cx - 25, 1) + "\" y=\"" + fmt_fixed(y_of(q3), 1) +
         "\" width=\"50\" height=\"" + fmt_fixed(y_of(q1) - y_of(q3), 1) +
         "\" fill=\"#cfe2f3\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt_fixed(cx - 25, 1) + "\" y1=\"" + fmt_fixed(y_of(med), 1) +
         "\" x2=\"" + fmt_fixed(cx + 25, 1) + "\" y2=\"" + fmt_fixed(y_of(med), 1) +
         "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt_fixed(cx, 1) + "\" y=\"" + fmt_fixed(bottom + 20, 1) +
         "\" text-anchor=\"middle\">" + svg_escape(rep.methods[j]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace detail

/// Writes hypervolume.csv, ranks.csv, cd.json, best_ensembles.csv and,
/// when `svg` is set, cd_plot.svg and boxplot.svg.
inline std::vector<fs::path> emit_report(const BenchmarkReport& rep, const fs::path& out_dir,
                                         bool svg = true) {
  if (rep.methods.empty() || rep.datasets.empty()) {
    throw ConfigError("emit_report: report has no methods or datasets");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto write = [&](const std::string& name, const std::string& text) {
    io::write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  };

  std::string hv = "dataset,method,mean_hypervolume\n";
  std::string best = "dataset,method,mean_test_auc,mean_infer_time_s\n";
  for (std::size_t i = 0; i < rep.datasets.size(); ++i) {
    for (std::size_t j = 0; j < rep.methods.size(); ++j) {
      hv += rep.datasets[i] + ',' + rep.methods[j] + ',' + io::format_double(rep.hypervolume[i][j]) + '\n';
      best += rep.datasets[i] + ',' + rep.methods[j] + ',' + io::format_double(rep.test_auc[i][j]) +
              ',' + io::format_double(rep.infer_time_s[i][j]) + '\n';
    }
  }
  write("hypervolume.csv", hv);

  std::string ranks = "method,avg_rank_hypervolume,avg_rank_test_auc\n";
  for (std::size_t j = 0; j < rep.methods.size(); ++j) {
    ranks += rep.methods[j] + ',' + io::format_double(rep.avg_rank_hypervolume[j]) + ',' +
             io::format_double(rep.avg_rank_test_auc[j]) + '\n';
  }
  write("ranks.csv", ranks);

  nlohmann::ordered_json cd;
  cd["methods"] = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < rep.methods.size(); ++j) {
    cd["methods"].push_back({{"method", rep.methods[j]}, {"avg_rank", rep.avg_rank_hypervolume[j]}});
  }
  cd["n_datasets"] = rep.datasets.size();
  cd["alpha"] = 0.05;
  cd["cd_value"] = rep.cd ? nlohmann::ordered_json(*rep.cd) : nlohmann::ordered_json(nullptr);
  if (rep.friedman) {
    cd["friedman_statistic"] = rep.friedman->statistic;
    cd["friedman_p_value"] = rep.friedman->p_value;
  }
  cd["groups"] = rep.groups;
  if (!rep.notice.empty()) cd["notice"] = rep.notice;
  write("cd.json", cd.dump(2) + "\n");
  write("best_ensembles.csv", best);

  if (svg) {
    write("cd_plot.svg", detail::cd_plot_svg(rep));
    write("boxplot.svg", detail::boxplot_svg(rep));
  }
  return written;
}

}  // namespace haes
