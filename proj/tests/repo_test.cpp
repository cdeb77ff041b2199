#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace haes {
namespace {

using testing::binary_repo;
using testing::temp_dir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelRepo three_model_repo() {
  ModelRepo repo = binary_repo({0, 1, 0, 1}, {{0.1, 0.9, 0.2, 0.7}, {0.4, 0.6, 0.5, 0.5},
                                              {0.3, 0.35, 0.2, 0.8}},
                               {0.1, 0.2, 0.3});
  for (std::size_t m = 0; m < 3; ++m) repo.models[m].config_features = {1.0, double(m)};
  return repo;
}

TEST(RepoTest, ValidManifestRoundTrips) {
  const ModelRepo repo = three_model_repo();
  const auto dir = temp_dir("roundtrip");
  const auto manifest = write_repo(repo, dir);
  const ModelRepo loaded = load_repo(manifest);
  EXPECT_EQ(loaded.n_models(), 3u);
  EXPECT_EQ(loaded, repo);
}

TEST(RepoTest, RowSummingAboveOneNamesTheModel) {
  ModelRepo repo = three_model_repo();
  repo.models[1].val_predictions(2, 1) = 1.0;  // row now sums to 1.5
  const auto manifest = write_repo(repo, temp_dir("badrow"));
  try {
    load_repo(manifest);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("model 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  }
}

TEST(RepoTest, ZeroInferenceTimeIsRejected) {
  ModelRepo repo = three_model_repo();
  repo.models[2].inference_time_s = 0.0;
  EXPECT_THROW(validate_repo(repo), ValidationError);
}

TEST(RepoTest, ShapeAndLabelChecks) {
  ModelRepo repo = three_model_repo();
  repo.val_labels = {0, 0, 0, 0};
  EXPECT_THROW(validate_repo(repo), ValidationError);

  repo = three_model_repo();
  repo.test_labels[0] = 2;
  EXPECT_THROW(validate_repo(repo), ValidationError);

  repo = three_model_repo();
  repo.models[0].test_predictions = testing::binary({0.5, 0.5});
  EXPECT_THROW(validate_repo(repo), ValidationError);

  repo = three_model_repo();
  repo.models[0].val_predictions(0, 0) = -0.1;
  repo.models[0].val_predictions(0, 1) = 1.1;
  EXPECT_THROW(validate_repo(repo), ValidationError);

  repo = three_model_repo();
  repo.models[1].config_features = {1.0};
  EXPECT_THROW(validate_repo(repo), ValidationError);
}

TEST(RepoTest, MissingFileIsIoError) {
  EXPECT_THROW(load_repo(temp_dir("missing") / "manifest.json"), IoError);
  const auto dir = temp_dir("garbage");
  io::write_text(dir / "manifest.json", "{ not json");
  EXPECT_THROW(load_repo(dir / "manifest.json"), IoError);
}

TEST(RepoTest, CsvDoublesRoundTripExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(io::parse_double(io::format_double(v), "t"), v);
  }
  EXPECT_THROW(io::parse_double("abc", "t"), IoError);
}

TEST(SyntheticTest, SameSeedGivesIdenticalRepo) {
  SyntheticRepoConfig c = testing::small_config(1);
  const ModelRepo a = generate_synthetic(c);
  const ModelRepo b = generate_synthetic(c);
  EXPECT_EQ(a, b);
  EXPECT_NO_THROW(validate_repo(a));

  const auto pa = write_repo(a, temp_dir("syn_a"));
  const auto pb = write_repo(b, temp_dir("syn_b"));
  for (const char* f : {"manifest.json", "val_labels.csv", "model_3_test.csv"}) {
    EXPECT_EQ(slurp(pa.parent_path() / f), slurp(pb.parent_path() / f)) << f;
  }
  c.seed = 2;
  EXPECT_NE(generate_synthetic(c), a);
}

TEST(SyntheticTest, HighAccuracyModelsBeatChance) {
  SyntheticRepoConfig c;
  c.accuracy_lo = 0.95;
  c.accuracy_hi = 0.99;
  c.n_val = 2000;
  c.seed = 11;
  const ModelRepo repo = generate_synthetic(c);
  for (std::size_t m = 0; m < repo.n_models(); ++m) {
    EXPECT_GT(ensemble_auc(Ensemble::singleton(m), repo, Split::kValidation), 0.5) << m;
  }
}

TEST(SyntheticTest, FullCorrelationGivesIdenticalModels) {
  SyntheticRepoConfig c = testing::small_config(4);
  c.correlation = 1.0;
  const ModelRepo repo = generate_synthetic(c);
  for (std::size_t m = 1; m < repo.n_models(); ++m) {
    EXPECT_EQ(repo.models[m].val_predictions, repo.models[0].val_predictions);
    EXPECT_EQ(repo.models[m].test_predictions, repo.models[0].test_predictions);
  }
}

TEST(SyntheticTest, TimesStayInRangeAndClassesAllPresent) {
  SyntheticRepoConfig c = testing::small_config(5, 30);
  c.n_classes = 4;
  c.n_val = 8;
  c.time_lo_s = 0.01;
  c.time_hi_s = 2.0;
  const ModelRepo repo = generate_synthetic(c);
  for (const auto& m : repo.models) {
    EXPECT_GE(m.inference_time_s, 0.01);
    EXPECT_LE(m.inference_time_s, 2.0);
  }
  std::set<int> seen(repo.val_labels.begin(), repo.val_labels.end());
  EXPECT_EQ(seen.size(), 4u);
}

TEST(SyntheticTest, FoldsShareModelTraits) {
  SyntheticRepoConfig c = testing::small_config(6);
  const ModelRepo f0 = generate_synthetic(c);
  c.fold_id = 1;
  const ModelRepo f1 = generate_synthetic(c);
  for (std::size_t m = 0; m < f0.n_models(); ++m) {
    EXPECT_EQ(f0.models[m].inference_time_s, f1.models[m].inference_time_s);
    EXPECT_EQ(f0.models[m].config_features, f1.models[m].config_features);
  }
  EXPECT_NE(f0.val_labels, f1.val_labels);
}

TEST(SyntheticTest, BadConfigsAreRejected) {
  SyntheticRepoConfig c;
  c.n_models = 0;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = {};
  c.accuracy_lo = 0.4;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = {};
  c.correlation = 1.5;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = {};
  c.time_lo_s = 0.0;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
}

}  // namespace
}  // namespace haes
