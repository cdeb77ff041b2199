#pragma once

// On-disk repo format: one JSON manifest per dataset-fold plus CSV matrices.
//
//   { "dataset_id": ..., "fold_id": ..., "n_classes": ...,
//     "models": [ { "model_id", "inference_time_s", "config_features"?,
//                   "val_predictions": <csv>, "test_predictions": <csv> } ],
//     "val_labels": <csv>, "test_labels": <csv> }
//
// CSV paths are resolved relative to the manifest's directory. Prediction
// CSVs carry a `c0,...,c{K-1}` header, label CSVs a `label` header.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "haes/error.hpp"
#include "haes/repo.hpp"

namespace haes {

namespace fs = std::filesystem;

namespace io {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw IoError(where + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline ProbMatrix read_prediction_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": missing header");
  const auto header = split_commas(lines[0]);
  const std::size_t k = header.size();
  for (std::size_t c = 0; c < k; ++c) {
    if (header[c] != "c" + std::to_string(c)) {
      throw IoError(path.string() + ": header column " + std::to_string(c) + " must be c" +
                    std::to_string(c));
    }
  }
  ProbMatrix m(lines.size() - 1, k);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_commas(lines[i]);
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (cells.size() != k) {
      throw ValidationError(where + ": expected " + std::to_string(k) + " columns, got " +
                            std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < k; ++c) m(i - 1, c) = parse_double(cells[c], where);
  }
  return m;
}

inline std::vector<int> read_label_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "label") {
    throw IoError(path.string() + ": header must be 'label'");
  }
  std::vector<int> labels;
  labels.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int y = 0;
    const std::string& s = lines[i];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": bad label '" + s + "'");
    }
    labels.push_back(y);
  }
  return labels;
}

inline std::string prediction_csv(const ProbMatrix& m) {
  std::string out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += 'c' + std::to_string(c);
  }
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(i, c));
    }
    out += '\n';
  }
  return out;
}

inline std::string label_csv(std::span<const int> labels) {
  std::string out = "label\n";
  for (int y : labels) {
    out += std::to_string(y);
    out += '\n';
  }
  return out;
}

}  // namespace io

/// Loads and validates one manifest. Side-effect free.
inline ModelRepo load_repo(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  const fs::path base = manifest_path.parent_path();

  ModelRepo repo;
  try {
    repo.dataset_id = doc.at("dataset_id").get<std::string>();
    repo.fold_id = doc.at("fold_id").get<std::size_t>();
    repo.n_classes = doc.at("n_classes").get<std::size_t>();
    repo.val_labels = io::read_label_csv(base / doc.at("val_labels").get<std::string>());
    repo.test_labels = io::read_label_csv(base / doc.at("test_labels").get<std::string>());
    for (const auto& jm : doc.at("models")) {
      ModelEntry e;
      e.model_id = jm.at("model_id").get<std::string>();
      e.inference_time_s = jm.at("inference_time_s").get<double>();
      if (jm.contains("config_features")) {
        e.config_features = jm.at("config_features").get<std::vector<double>>();
        if (e.config_features.empty()) {
          throw ValidationError("model " + e.model_id + ": config_features must be non-empty");
        }
      }
      e.val_predictions =
          io::read_prediction_csv(base / jm.at("val_predictions").get<std::string>());
      e.test_predictions =
          io::read_prediction_csv(base / jm.at("test_predictions").get<std::string>());
      repo.models.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  validate_repo(repo);
  return repo;
}

/// Writes `manifest.json` plus CSVs into `dir`. Returns the manifest path.
inline fs::path write_repo(const ModelRepo& repo, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json doc;
  doc["dataset_id"] = repo.dataset_id;
  doc["fold_id"] = repo.fold_id;
  doc["n_classes"] = repo.n_classes;
  doc["val_labels"] = "val_labels.csv";
  doc["test_labels"] = "test_labels.csv";
  io::write_text(dir / "val_labels.csv", io::label_csv(repo.val_labels));
  io::write_text(dir / "test_labels.csv", io::label_csv(repo.test_labels));

  auto models = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < repo.models.size(); ++m) {
    const ModelEntry& e = repo.models[m];
    const std::string stem = "model_" + std::to_string(m);
    nlohmann::ordered_json jm;
    jm["model_id"] = e.model_id;
    jm["inference_time_s"] = e.inference_time_s;
    if (!e.config_features.empty()) jm["config_features"] = e.config_features;
    jm["val_predictions"] = stem + "_val.csv";
    jm["test_predictions"] = stem + "_test.csv";
    io::write_text(dir / (stem + "_val.csv"), io::prediction_csv(e.val_predictions));
    io::write_text(dir / (stem + "_test.csv"), io::prediction_csv(e.test_predictions));
    models.push_back(std::move(jm));
  }
  doc["models"] = std::move(models);
  const fs::path manifest = dir / "manifest.json";
  io::write_text(manifest, doc.dump(2) + "\n");
  return manifest;
}

}  // namespace haes
