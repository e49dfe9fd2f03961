#include "fatigue/ensemble.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace fatigue::ensemble {

using nlohmann::json;

double gini_impurity(int64_t n0, int64_t n1) {
  const int64_t n = n0 + n1;
  if (n < 1) throw std::invalid_argument("gini_impurity: empty node");
  const double f0 = static_cast<double>(n0) / n;
  const double f1 = static_cast<double>(n1) / n;
  return 1.0 - f0 * f0 - f1 * f1;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double weighted_gini = 0.0;
};

std::unique_ptr<TreeNode> make_leaf(const std::array<int64_t, 2>& counts) {
  auto node = std::make_unique<TreeNode>();
  node->leaf = true;
  node->class_counts = counts;
  node->leaf_class = counts[1] > counts[0] ? 1 : 0;  // tie -> class 0
  return node;
}

std::unique_ptr<TreeNode> grow(const std::vector<std::array<double, 4>>& rows,
                               const std::vector<int>& labels,
                               std::vector<size_t>& indices, int depth,
                               const TreeLimits& limits) {
  std::array<int64_t, 2> counts{0, 0};
  for (size_t i : indices) ++counts[labels[i]];
  const int64_t n = static_cast<int64_t>(indices.size());

  const double parent_gini = gini_impurity(counts[0], counts[1]);
  const bool depth_stop = limits.max_depth >= 0 && depth >= limits.max_depth;
  if (parent_gini == 0.0 || depth_stop || n < 2 * limits.min_leaf)
    return make_leaf(counts);

  SplitChoice best;
  std::vector<size_t> order(indices);
  for (int f = 0; f < 4; ++f) {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return rows[a][f] < rows[b][f];
    });
    std::array<int64_t, 2> left{0, 0};
    for (int64_t i = 0; i + 1 < n; ++i) {
      ++left[labels[order[i]]];
      const double lo = rows[order[i]][f];
      const double hi = rows[order[i + 1]][f];
      if (lo == hi) continue;
      const int64_t nl = i + 1;
      const int64_t nr = n - nl;
      if (nl < limits.min_leaf || nr < limits.min_leaf) continue;
      const double wg =
          (nl * gini_impurity(left[0], left[1]) +
           nr * gini_impurity(counts[0] - left[0], counts[1] - left[1])) /
          static_cast<double>(n);
      if (!best.found || wg < best.weighted_gini) {
        best = {true, f, 0.5 * (lo + hi), wg};
      }
    }
  }

  if (!best.found || best.weighted_gini >= parent_gini)
    return make_leaf(counts);

  std::vector<size_t> left_idx, right_idx;
  for (size_t i : indices) {
    (rows[i][best.feature] < best.threshold ? left_idx : right_idx).push_back(i);
  }

  auto node = std::make_unique<TreeNode>();
  node->leaf = false;
  node->class_counts = counts;
  node->leaf_class = counts[1] > counts[0] ? 1 : 0;
  node->feature_index = best.feature;
  node->threshold = best.threshold;
  node->left = grow(rows, labels, left_idx, depth + 1, limits);
  node->right = grow(rows, labels, right_idx, depth + 1, limits);
  return node;
}

}  // namespace

std::unique_ptr<TreeNode> train_tree(
    std::span<const std::array<double, 4>> rows, std::span<const int> labels,
    const TreeLimits& limits) {
  if (rows.empty()) throw std::invalid_argument("train_tree: empty input");
  if (rows.size() != labels.size())
    throw std::invalid_argument("train_tree: rows/labels length mismatch");
  const std::vector<std::array<double, 4>> r(rows.begin(), rows.end());
  const std::vector<int> l(labels.begin(), labels.end());
  std::vector<size_t> indices(rows.size());
  std::iota(indices.begin(), indices.end(), size_t{0});
  return grow(r, l, indices, 0, limits);
}

std::vector<size_t> bootstrap_sample(size_t n, SplitMix64& rng) {
  if (n == 0) throw std::invalid_argument("bootstrap_sample: n must be positive");
  std::vector<size_t> indices(n);
  for (size_t i = 0; i < n; ++i)
    indices[i] = static_cast<size_t>(rng.next_index(n));
  return indices;
}

BaggedModel train_ensemble(const features::LabeledDataset& dataset,
                           const features::Normalizer& normalizer,
                           const EnsembleConfig& cfg,
                           const std::string& channel_name,
                           const features::WindowingConfig& window,
                           double alpha) {
  if (cfg.trees < 1) throw std::invalid_argument("ensemble size must be >= 1");
  if (dataset.rows.empty()) throw std::invalid_argument("empty training set");

  const size_t n = dataset.rows.size();
  std::vector<std::array<double, 4>> norm_rows(n);
  for (size_t i = 0; i < n; ++i)
    norm_rows[i] = features::apply_normalizer(normalizer, dataset.rows[i].as_array());

  BaggedModel model;
  model.seed = cfg.seed;
  model.tie_class = cfg.tie_class;
  model.channel_name = channel_name;
  model.normalizer = normalizer;
  model.window = window;
  model.alpha = alpha;

  for (int t = 0; t < cfg.trees; ++t) {
    SplitMix64 rng(derive_stream_seed(cfg.seed, static_cast<uint64_t>(t)));
    const std::vector<size_t> sample = bootstrap_sample(n, rng);
    std::vector<std::array<double, 4>> rows;
    std::vector<int> labels;
    rows.reserve(n);
    labels.reserve(n);
    for (size_t i : sample) {
      rows.push_back(norm_rows[i]);
      labels.push_back(dataset.labels[i]);
    }
    model.trees.push_back(train_tree(rows, labels, cfg.limits));
  }
  return model;
}

int predict_tree(const TreeNode& node, const std::array<double, 4>& row) {
  const TreeNode* cur = &node;
  while (!cur->leaf) {
    cur = row[cur->feature_index] < cur->threshold ? cur->left.get()
                                                   : cur->right.get();
  }
  return cur->leaf_class;
}

Prediction predict(const BaggedModel& model, const std::array<double, 4>& raw_row) {
  if (model.trees.empty()) throw std::invalid_argument("predict: empty model");
  const std::array<double, 4> row =
      features::apply_normalizer(model.normalizer, raw_row);
  int votes1 = 0;
  for (const auto& tree : model.trees) votes1 += predict_tree(*tree, row);
  const int total = model.ensemble_size();
  Prediction pred;
  pred.vote_fraction = static_cast<double>(votes1) / total;
  if (2 * votes1 > total) {
    pred.label = 1;
  } else if (2 * votes1 < total) {
    pred.label = 0;
  } else {
    pred.label = model.tie_class;
  }
  return pred;
}

namespace {

constexpr int kSchemaVersion = 1;

json tree_to_json(const TreeNode& node) {
  json j;
  j["counts"] = {node.class_counts[0], node.class_counts[1]};
  if (node.leaf) {
    j["class"] = node.leaf_class;
  } else {
    j["feature"] = node.feature_index;
    j["threshold"] = node.threshold;
    j["left"] = tree_to_json(*node.left);
    j["right"] = tree_to_json(*node.right);
  }
  return j;
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  const auto& counts = j.at("counts");
  node->class_counts = {counts.at(0).get<int64_t>(), counts.at(1).get<int64_t>()};
  if (j.contains("feature")) {
    node->leaf = false;
    node->feature_index = j.at("feature").get<int>();
    if (node->feature_index < 0 || node->feature_index > 3)
      throw std::runtime_error("model document: feature index " +
                               std::to_string(node->feature_index) +
                               " out of range [0,3]");
    node->threshold = j.at("threshold").get<double>();
    node->left = tree_from_json(j.at("left"));
    node->right = tree_from_json(j.at("right"));
    node->leaf_class = node->class_counts[1] > node->class_counts[0] ? 1 : 0;
  } else {
    node->leaf = true;
    node->leaf_class = j.at("class").get<int>();
    if (node->leaf_class != 0 && node->leaf_class != 1)
      throw std::runtime_error("model document: leaf class must be 0 or 1");
  }
  return node;
}

}  // namespace

std::string serialize(const BaggedModel& model) {
  json j;
  j["version"] = kSchemaVersion;
  j["seed"] = model.seed;
  j["ensemble_size"] = model.ensemble_size();
  j["channel_name"] = model.channel_name;
  j["tie_class"] = model.tie_class;
  j["normalizer"] = {{"min", model.normalizer.min}, {"max", model.normalizer.max}};
  j["config"] = {{"window_s", model.window.window_s},
                 {"step_s", model.window.step_s},
                 {"alpha", model.alpha}};
  j["trees"] = json::array();
  for (const auto& tree : model.trees) j["trees"].push_back(tree_to_json(*tree));
  return j.dump(2);
}

BaggedModel deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed model document: ") + e.what());
  }
  const int version = j.at("version").get<int>();
  if (version != kSchemaVersion)
    throw std::runtime_error("unsupported model schema version " +
                             std::to_string(version) + "; supported versions: " +
                             std::to_string(kSchemaVersion));
  BaggedModel model;
  model.seed = j.at("seed").get<uint64_t>();
  model.tie_class = j.at("tie_class").get<int>();
  model.channel_name = j.at("channel_name").get<std::string>();
  const auto& nz = j.at("normalizer");
  for (size_t f = 0; f < 4; ++f) {
    model.normalizer.min[f] = nz.at("min").at(f).get<double>();
    model.normalizer.max[f] = nz.at("max").at(f).get<double>();
  }
  const auto& cfg = j.at("config");
  model.window.window_s = cfg.at("window_s").get<double>();
  model.window.step_s = cfg.at("step_s").get<double>();
  model.alpha = cfg.at("alpha").get<double>();
  for (const auto& tj : j.at("trees")) model.trees.push_back(tree_from_json(tj));
  if (model.trees.empty() ||
      model.ensemble_size() != j.at("ensemble_size").get<int>())
    throw std::runtime_error("model document: tree count disagrees with ensemble_size");
  return model;
}

void save_model(const BaggedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << serialize(model) << '\n';
}

BaggedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize(text);
}

}  // namespace fatigue::ensemble
