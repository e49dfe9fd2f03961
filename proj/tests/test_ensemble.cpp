#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "fatigue/ensemble.hpp"
#include "fatigue/rng.hpp"
#include "json.hpp"

using namespace fatigue;

namespace {

features::LabeledDataset make_dataset(
    const std::vector<std::array<double, 4>>& rows,
    const std::vector<int>& labels) {
  features::LabeledDataset ds;
  for (size_t i = 0; i < rows.size(); ++i) {
    features::FeatureVector fv;
    fv.robust_scale = rows[i][0];
    fv.robust_location = rows[i][1];
    fv.variance = rows[i][2];
    fv.autocovariance = rows[i][3];
    ds.rows.push_back(fv);
    ds.labels.push_back(labels[i]);
    ds.recording_ids.push_back(static_cast<int>(i));
  }
  return ds;
}

features::Normalizer identity_normalizer() {
  features::Normalizer nz;
  nz.min.fill(-1.0);
  nz.max.fill(1.0);
  return nz;
}

}  // namespace

TEST_CASE("gini_impurity") {
  CHECK(ensemble::gini_impurity(4, 0) == 0.0);
  CHECK(ensemble::gini_impurity(2, 2) == 0.5);
  CHECK(ensemble::gini_impurity(3, 1) == doctest::Approx(0.375));
  CHECK_THROWS_AS(ensemble::gini_impurity(0, 0), std::invalid_argument);
}

TEST_CASE("train_tree: separable one-feature problem") {
  const std::vector<std::array<double, 4>> rows{
      {0.1, 0.0, 0.0, 0.0}, {0.2, 0.0, 0.0, 0.0},
      {0.8, 0.0, 0.0, 0.0}, {0.9, 0.0, 0.0, 0.0}};
  const std::vector<int> labels{0, 0, 1, 1};
  const auto tree = ensemble::train_tree(rows, labels, {});
  REQUIRE(!tree->leaf);
  CHECK(tree->feature_index == 0);
  CHECK(tree->threshold == doctest::Approx(0.5));
  CHECK(tree->left->leaf);
  CHECK(tree->right->leaf);
  for (size_t i = 0; i < rows.size(); ++i)
    CHECK(ensemble::predict_tree(*tree, rows[i]) == labels[i]);
}

TEST_CASE("train_tree: stopping rules") {
  const std::vector<std::array<double, 4>> same_label{
      {0.1, 0, 0, 0}, {0.9, 0, 0, 0}};
  const auto pure = ensemble::train_tree(same_label, std::vector<int>{1, 1}, {});
  CHECK(pure->leaf);
  CHECK(pure->leaf_class == 1);

  // Identical rows, conflicting labels: no split exists, tie -> class 0.
  const std::vector<std::array<double, 4>> dup{{0.5, 0, 0, 0}, {0.5, 0, 0, 0}};
  const auto tie = ensemble::train_tree(dup, std::vector<int>{0, 1}, {});
  CHECK(tie->leaf);
  CHECK(tie->leaf_class == 0);

  CHECK_THROWS_AS(ensemble::train_tree({}, {}, {}), std::invalid_argument);
}

TEST_CASE("tree prediction invariant under monotone feature transforms") {
  SplitMix64 rng(13);
  std::vector<std::array<double, 4>> rows(80);
  std::vector<int> labels(80);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (auto& v : rows[i]) v = rng.next_normal();
    labels[i] = rows[i][2] + 0.3 * rng.next_normal() > 0.0 ? 1 : 0;
  }
  const auto tree = ensemble::train_tree(rows, labels, {});

  auto transformed = rows;
  for (auto& r : transformed)
    for (size_t f = 0; f < 4; ++f) r[f] = std::exp(r[f]);  // strictly monotone
  const auto tree2 = ensemble::train_tree(transformed, labels, {});
  for (size_t i = 0; i < rows.size(); ++i)
    CHECK(ensemble::predict_tree(*tree, rows[i]) ==
          ensemble::predict_tree(*tree2, transformed[i]));
}

TEST_CASE("bootstrap_sample") {
  SplitMix64 one(5);
  CHECK(ensemble::bootstrap_sample(1, one) == std::vector<size_t>{0});

  SplitMix64 a(17), b(17);
  CHECK(ensemble::bootstrap_sample(1000, a) == ensemble::bootstrap_sample(1000, b));

  SplitMix64 big(3);
  const auto idx = ensemble::bootstrap_sample(100000, big);
  const std::set<size_t> distinct(idx.begin(), idx.end());
  const double frac = static_cast<double>(distinct.size()) / idx.size();
  CHECK(frac > 0.622);
  CHECK(frac < 0.642);

  SplitMix64 z(1);
  CHECK_THROWS_AS(ensemble::bootstrap_sample(0, z), std::invalid_argument);
}

TEST_CASE("train_ensemble: determinism, prefix stability, accuracy") {
  SplitMix64 rng(31);
  std::vector<std::array<double, 4>> rows(200);
  std::vector<int> labels(200);
  for (size_t i = 0; i < rows.size(); ++i) {
    const int label = static_cast<int>(i % 2);
    for (auto& v : rows[i]) v = 0.25 * rng.next_normal() + (label ? 0.5 : -0.5);
    labels[i] = label;
  }
  const auto ds = make_dataset(rows, labels);
  const auto nz = features::fit_normalizer(ds);

  ensemble::EnsembleConfig cfg;
  cfg.trees = 30;
  const auto m1 = ensemble::train_ensemble(ds, nz, cfg, "TP7", {}, 0.5);
  const auto m2 = ensemble::train_ensemble(ds, nz, cfg, "TP7", {}, 0.5);
  CHECK(ensemble::serialize(m1) == ensemble::serialize(m2));

  // Growing the ensemble leaves the first trees untouched.
  ensemble::EnsembleConfig bigger = cfg;
  bigger.trees = 40;
  const auto m3 = ensemble::train_ensemble(ds, nz, bigger, "TP7", {}, 0.5);
  for (int t = 0; t < cfg.trees; ++t) {
    SplitMix64 ra(derive_stream_seed(cfg.seed, t)), rb(derive_stream_seed(bigger.seed, t));
    CHECK(ensemble::bootstrap_sample(rows.size(), ra) ==
          ensemble::bootstrap_sample(rows.size(), rb));
  }
  // The serialized prefix of m3's tree list matches m1's.
  const std::string s1 = ensemble::serialize(m1);
  const std::string s3 = ensemble::serialize(m3);
  CHECK(s3.find(s1.substr(s1.find("\"trees\""), 200)) != std::string::npos);

  size_t correct = 0;
  for (size_t i = 0; i < rows.size(); ++i)
    correct += ensemble::predict(m1, rows[i]).label == labels[i];
  CHECK(static_cast<double>(correct) / rows.size() >= 0.99);
}

TEST_CASE("predict: majority and tie rules") {
  // Build a tiny hand-made model: three stub trees voting 1, 1, 0.
  ensemble::BaggedModel model;
  model.normalizer = identity_normalizer();
  for (int vote : {1, 1, 0}) {
    auto leaf = std::make_unique<ensemble::TreeNode>();
    leaf->leaf_class = vote;
    leaf->class_counts = {vote ? 0 : 1, vote ? 1 : 0};
    model.trees.push_back(std::move(leaf));
  }
  const auto p = ensemble::predict(model, {0, 0, 0, 0});
  CHECK(p.label == 1);
  CHECK(p.vote_fraction == doctest::Approx(2.0 / 3));

  ensemble::BaggedModel unanimous;
  unanimous.normalizer = identity_normalizer();
  for (int i = 0; i < 4; ++i) {
    auto leaf = std::make_unique<ensemble::TreeNode>();
    leaf->leaf_class = 0;
    leaf->class_counts = {1, 0};
    unanimous.trees.push_back(std::move(leaf));
  }
  const auto u = ensemble::predict(unanimous, {0, 0, 0, 0});
  CHECK(u.label == 0);
  CHECK(u.vote_fraction == 0.0);

  ensemble::BaggedModel split;
  split.normalizer = identity_normalizer();
  for (int vote : {1, 0}) {
    auto leaf = std::make_unique<ensemble::TreeNode>();
    leaf->leaf_class = vote;
    leaf->class_counts = {vote ? 0 : 1, vote ? 1 : 0};
    split.trees.push_back(std::move(leaf));
  }
  CHECK(ensemble::predict(split, {0, 0, 0, 0}).label == 0);  // tie -> alert
  split.tie_class = 1;
  CHECK(ensemble::predict(split, {0, 0, 0, 0}).label == 1);
  CHECK(ensemble::predict(split, {0, 0, 0, 0}).vote_fraction == 0.5);
}

TEST_CASE("serialize / deserialize") {
  SplitMix64 rng(77);
  std::vector<std::array<double, 4>> rows(60);
  std::vector<int> labels(60);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (auto& v : rows[i]) v = rng.next_normal();
    labels[i] = rows[i][0] > 0 ? 1 : 0;
  }
  const auto ds = make_dataset(rows, labels);
  const auto nz = features::fit_normalizer(ds);
  ensemble::EnsembleConfig cfg;
  cfg.trees = 7;
  const auto model = ensemble::train_ensemble(ds, nz, cfg, "TP7", {2.0, 0.5}, 0.6);

  const std::string text = ensemble::serialize(model);
  const auto back = ensemble::deserialize(text);
  CHECK(back.channel_name == "TP7");
  CHECK(back.alpha == 0.6);
  CHECK(back.ensemble_size() == 7);
  CHECK(ensemble::serialize(back) == text);

  // Predictions survive the round trip on random rows.
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 4> row;
    for (auto& v : row) v = 3.0 * rng.next_normal();
    const auto p1 = ensemble::predict(model, row);
    const auto p2 = ensemble::predict(back, row);
    CHECK(p1.label == p2.label);
    CHECK(p1.vote_fraction == p2.vote_fraction);
  }

  CHECK_THROWS_WITH_AS(ensemble::deserialize(text.substr(0, text.size() / 2)),
                       doctest::Contains("malformed model document"),
                       std::runtime_error);

  nlohmann::json j = nlohmann::json::parse(text);
  j["version"] = 99;
  CHECK_THROWS_WITH_AS(ensemble::deserialize(j.dump()),
                       doctest::Contains("supported versions: 1"),
                       std::runtime_error);

  nlohmann::json bad = nlohmann::json::parse(text);
  bad["trees"][0] = {{"counts", {1, 1}}, {"feature", 7}, {"threshold", 0.0},
                     {"left", {{"counts", {1, 0}}, {"class", 0}}},
                     {"right", {{"counts", {0, 1}}, {"class", 1}}}};
  CHECK_THROWS_WITH_AS(ensemble::deserialize(bad.dump()),
                       doctest::Contains("out of range"), std::runtime_error);
}

TEST_CASE("odd ensemble never ties") {
  SplitMix64 rng(41);
  std::vector<std::array<double, 4>> rows(50);
  std::vector<int> labels(50);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (auto& v : rows[i]) v = rng.next_normal();
    labels[i] = rows[i][1] > 0 ? 1 : 0;
  }
  const auto ds = make_dataset(rows, labels);
  ensemble::EnsembleConfig cfg;
  cfg.trees = 31;
  const auto model = ensemble::train_ensemble(
      ds, features::fit_normalizer(ds), cfg, "", {}, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 4> row;
    for (auto& v : row) v = rng.next_normal();
    CHECK(ensemble::predict(model, row).vote_fraction != 0.5);
  }
}
