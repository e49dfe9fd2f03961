#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fatigue/features.hpp"
#include "fatigue/rng.hpp"

namespace fatigue::ensemble {

// Binary CART node. Rows with feature < threshold go left, >= go right.
struct TreeNode {
  bool leaf = true;
  int leaf_class = 0;
  std::array<int64_t, 2> class_counts{0, 0};
  int feature_index = -1;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
};

struct TreeLimits {
  int max_depth = -1;  // unlimited
  int min_leaf = 1;
};

struct EnsembleConfig {
  int trees = 30;
  uint64_t seed = 42;
  TreeLimits limits;
  int tie_class = 0;  // predicted on an exact vote tie; 0 = alert
};

struct BaggedModel {
  std::vector<std::unique_ptr<TreeNode>> trees;
  uint64_t seed = 42;
  int tie_class = 0;
  std::string channel_name;
  features::Normalizer normalizer;
  features::WindowingConfig window;
  double alpha = 0.5;

  int ensemble_size() const { return static_cast<int>(trees.size()); }
};

struct Prediction {
  int label = 0;
  double vote_fraction = 0.0;  // fraction of trees voting fatigue
};

// 1 - (n0/n)^2 - (n1/n)^2, in [0, 0.5] for two classes.
double gini_impurity(int64_t n0, int64_t n1);

// Exhaustive CART: candidate thresholds are midpoints of consecutive
// distinct sorted values per feature; best (feature, threshold) by weighted
// child Gini, ties to lowest feature index then lowest threshold.
std::unique_ptr<TreeNode> train_tree(
    std::span<const std::array<double, 4>> rows, std::span<const int> labels,
    const TreeLimits& limits);

// n indices uniform with replacement, deterministic for a given rng state.
std::vector<size_t> bootstrap_sample(size_t n, SplitMix64& rng);

// Trees train on bootstrap resamples of the normalized rows; tree t's RNG
// stream is derived from (seed, t) so the first T trees are identical when
// the ensemble later grows.
BaggedModel train_ensemble(const features::LabeledDataset& dataset,
                           const features::Normalizer& normalizer,
                           const EnsembleConfig& cfg,
                           const std::string& channel_name,
                           const features::WindowingConfig& window,
                           double alpha);

int predict_tree(const TreeNode& node, const std::array<double, 4>& row);

// Majority vote over trees on the raw (unnormalized) feature row; the
// model's frozen normalizer is applied internally.
Prediction predict(const BaggedModel& model, const std::array<double, 4>& raw_row);

// Versioned JSON document; numeric fields round-trip bit-stably.
std::string serialize(const BaggedModel& model);
BaggedModel deserialize(const std::string& text);

void save_model(const BaggedModel& model, const std::filesystem::path& path);
BaggedModel load_model(const std::filesystem::path& path);

}  // namespace fatigue::ensemble
