#include <gtest/gtest.h>

#include "test_util.hpp"

namespace haes {
namespace {

TEST(EnsembleTest, CountsAndSerialization) {
  Ensemble e{{3, 2}, {0, 1}, {5, 0}};
  EXPECT_EQ(e.size(), 2u);
  EXPECT_EQ(e.total(), 3u);
  EXPECT_FALSE(e.contains(5));
  EXPECT_EQ(e.serialize(), "0:1,3:2");
  e.remove_one(3);
  e.remove_one(3);
  EXPECT_EQ(e, Ensemble::singleton(0));
  EXPECT_THROW(e.remove_one(4), ConfigError);
  EXPECT_EQ(e.index_bound(), 1u);
}

TEST(CombineTest, Examples) {
  const ProbMatrix a = testing::matrix({{1.0, 0.0}, {0.3, 0.7}});
  const ProbMatrix b = testing::matrix({{0.0, 1.0}, {0.6, 0.4}});
  const ProbMatrix c = testing::matrix({{0.5, 0.5}, {0.5, 0.5}});
  const ProbMatrix d = testing::matrix({{0.25, 0.75}, {0.9, 0.1}});
  const std::vector<const ProbMatrix*> preds = {&a, &b, &c, &d};

  EXPECT_EQ(combine_predictions(Ensemble::singleton(3), preds), d);
  const std::vector<const ProbMatrix*> same = {&a, &a};
  EXPECT_EQ(combine_predictions(Ensemble{{0, 1}, {1, 1}}, same), a);

  const ProbMatrix m = combine_predictions(Ensemble{{0, 2}, {1, 1}}, preds);
  EXPECT_DOUBLE_EQ(m(0, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 1.0 / 3.0);
  EXPECT_THROW(combine_predictions(Ensemble{{4, 1}}, preds), ConfigError);
  EXPECT_THROW(combine_predictions(Ensemble{}, preds), ConfigError);
}

TEST(CombineTest, RowsStayNormalized) {
  const ModelRepo repo = generate_synthetic(testing::small_config(3));
  const ProbMatrix m = combine_predictions(Ensemble{{1, 3}, {4, 1}, {9, 2}}, repo, Split::kTest);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(EvaluateTest, MatchesNaiveOracle) {
  SyntheticRepoConfig c = testing::small_config(8);
  c.n_classes = 3;
  const ModelRepo repo = generate_synthetic(c);
  const Ensemble e{{0, 2}, {3, 1}, {6, 4}};
  const EvaluatedEnsemble r = evaluate(e, repo);
  EXPECT_NEAR(r.val_auc, testing::naive_ensemble_auc(e, repo, Split::kValidation), 1e-12);
  EXPECT_NEAR(r.test_auc, testing::naive_ensemble_auc(e, repo, Split::kTest), 1e-12);
  EXPECT_DOUBLE_EQ(r.inference_time_s, repo.models[0].inference_time_s +
                                           repo.models[3].inference_time_s +
                                           repo.models[6].inference_time_s);
  EXPECT_EQ(r.size, 3u);
  EXPECT_EQ(evaluate(e, repo), r);
  EXPECT_DOUBLE_EQ(r.objectives().accuracy_loss, 1.0 - r.test_auc);
}

TEST(SingleBestTest, Examples) {
  const std::vector<int> y = {0, 1, 0, 1, 0, 1};
  // val AUCs: model 0 = 7/9, model 1 = 1, model 2 = 8/9
  const ModelRepo repo = testing::binary_repo(
      y, {{0.1, 0.4, 0.5, 0.9, 0.6, 0.7}, {0.1, 0.9, 0.2, 0.8, 0.3, 0.7},
          {0.1, 0.5, 0.6, 0.9, 0.2, 0.7}});
  EXPECT_EQ(single_best(repo), Ensemble::singleton(1));
  const double own = roc_auc_binary(repo.models[1].val_predictions.column(1), y);
  EXPECT_DOUBLE_EQ(evaluate(single_best(repo), repo).val_auc, own);

  const ModelRepo tie = testing::binary_repo(y, {{0.1, 0.9, 0.2, 0.8, 0.3, 0.7},
                                                 {0.2, 0.8, 0.1, 0.9, 0.3, 0.6}});
  EXPECT_EQ(single_best(tie), Ensemble::singleton(0));
  const ModelRepo same = testing::binary_repo(y, std::vector<std::vector<double>>(
                                                     4, {0.1, 0.4, 0.5, 0.9, 0.6, 0.7}));
  EXPECT_EQ(single_best(same), Ensemble::singleton(0));
}

}  // namespace
}  // namespace haes
