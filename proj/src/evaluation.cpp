#include "fatigue/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fatigue/rng.hpp"
#include "fatigue/stats.hpp"
#include "json.hpp"

namespace fatigue::evaluation {

namespace {

void shuffle_indices(std::vector<size_t>& v, uint64_t seed) {
  SplitMix64 rng(seed);
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.next_index(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::vector<std::vector<size_t>> kfold_split(
    const features::LabeledDataset& dataset, int k, uint64_t seed,
    FoldGrouping grouping) {
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  const size_t n = dataset.size();
  std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));

  if (grouping == FoldGrouping::Row) {
    if (static_cast<size_t>(k) > n)
      throw std::invalid_argument("kfold_split: k exceeds group count (" +
                                  std::to_string(n) + " rows)");
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    shuffle_indices(order, seed);
    for (size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  } else {
    std::vector<int> ids;
    for (int id : dataset.recording_ids)
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    if (static_cast<size_t>(k) > ids.size())
      throw std::invalid_argument("kfold_split: k exceeds group count (" +
                                  std::to_string(ids.size()) + " recordings)");
    std::vector<size_t> order(ids.size());
    std::iota(order.begin(), order.end(), size_t{0});
    shuffle_indices(order, seed);
    std::vector<int> fold_of_id;
    std::vector<int> id_list;
    for (size_t i = 0; i < order.size(); ++i) {
      id_list.push_back(ids[order[i]]);
      fold_of_id.push_back(static_cast<int>(i % k));
    }
    for (size_t row = 0; row < n; ++row) {
      const int id = dataset.recording_ids[row];
      const auto it = std::find(id_list.begin(), id_list.end(), id);
      folds[static_cast<size_t>(fold_of_id[it - id_list.begin()])].push_back(row);
    }
  }
  return folds;
}

Metrics confusion_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  if (cm.tp + cm.fn > 0)
    m.sensitivity = static_cast<double>(cm.tp) / (cm.tp + cm.fn);
  if (cm.tn + cm.fp > 0)
    m.specificity = static_cast<double>(cm.tn) / (cm.tn + cm.fp);
  if (cm.total() > 0)
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: scores/labels length mismatch");
  const size_t n = scores.size();
  size_t n1 = 0;
  for (int l : labels) n1 += (l == 1);
  const size_t n0 = n - n1;
  if (n0 == 0 || n1 == 0)
    throw std::invalid_argument("roc_auc: both classes must be present");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Midranks over tie groups; AUC from the positive-class rank sum.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n1) * (n1 + 1);
  return u / (static_cast<double>(n0) * static_cast<double>(n1));
}

AnovaResult anova_f_test(std::span<const double> group0,
                         std::span<const double> group1) {
  if (group0.size() < 2 || group1.size() < 2)
    throw std::invalid_argument("anova_f_test: each group needs >= 2 values");
  const double n0 = static_cast<double>(group0.size());
  const double n1 = static_cast<double>(group1.size());
  const double m0 = stats::mean(group0);
  const double m1 = stats::mean(group1);
  const double grand = (n0 * m0 + n1 * m1) / (n0 + n1);

  const double ssb = n0 * (m0 - grand) * (m0 - grand) +
                     n1 * (m1 - grand) * (m1 - grand);
  double ssw = 0.0;
  for (double v : group0) ssw += (v - m0) * (v - m0);
  for (double v : group1) ssw += (v - m1) * (v - m1);

  const int df_within = static_cast<int>(n0 + n1) - 2;
  AnovaResult r;
  if (ssw == 0.0) {
    if (ssb == 0.0) {
      r.f = 0.0;
      r.p = 1.0;
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.f = ssb / (ssw / df_within);
  r.p = stats::f_distribution_sf(r.f, 1, df_within);
  return r;
}

EvaluationReport cross_validate(const features::LabeledDataset& dataset,
                                const ensemble::EnsembleConfig& cfg, int k,
                                uint64_t seed, FoldGrouping grouping) {
  if (dataset.rows.empty())
    throw std::invalid_argument("cross_validate: empty dataset");
  const auto folds = kfold_split(dataset, k, seed, grouping);

  EvaluationReport report;
  report.scores.assign(dataset.size(), 0.0);
  report.predicted.assign(dataset.size(), 0);

  double total_predict_s = 0.0;
  size_t total_predictions = 0;

  for (size_t fold = 0; fold < folds.size(); ++fold) {
    features::LabeledDataset train;
    for (size_t other = 0; other < folds.size(); ++other) {
      if (other == fold) continue;
      for (size_t row : folds[other]) {
        train.rows.push_back(dataset.rows[row]);
        train.labels.push_back(dataset.labels[row]);
        train.recording_ids.push_back(dataset.recording_ids[row]);
      }
    }
    const features::Normalizer nz = features::fit_normalizer(train);
    ensemble::EnsembleConfig fold_cfg = cfg;
    fold_cfg.seed = derive_stream_seed(cfg.seed, fold);
    const ensemble::BaggedModel model = ensemble::train_ensemble(
        train, nz, fold_cfg, "", features::WindowingConfig{}, 0.5);

    FoldMetrics fm;
    const auto t0 = std::chrono::steady_clock::now();
    for (size_t row : folds[fold]) {
      const ensemble::Prediction pred =
          ensemble::predict(model, dataset.rows[row].as_array());
      report.scores[row] = pred.vote_fraction;
      report.predicted[row] = pred.label;
      fm.cm.add(dataset.labels[row], pred.label);
    }
    const auto t1 = std::chrono::steady_clock::now();
    total_predict_s += std::chrono::duration<double>(t1 - t0).count();
    total_predictions += folds[fold].size();

    fm.metrics = confusion_metrics(fm.cm);
    report.per_fold.push_back(fm);
    report.pooled.tp += fm.cm.tp;
    report.pooled.fp += fm.cm.fp;
    report.pooled.tn += fm.cm.tn;
    report.pooled.fn += fm.cm.fn;
  }

  report.metrics = confusion_metrics(report.pooled);
  report.auc = roc_auc(report.scores, dataset.labels);
  report.mean_prediction_latency_s =
      total_predictions ? total_predict_s / static_cast<double>(total_predictions)
                        : 0.0;

  // Between-class ANOVA on each raw feature over the full dataset.
  for (size_t f = 0; f < 4; ++f) {
    std::vector<double> g0, g1;
    for (size_t row = 0; row < dataset.size(); ++row) {
      (dataset.labels[row] == 1 ? g1 : g0)
          .push_back(dataset.rows[row].as_array()[f]);
    }
    report.anova.push_back(anova_f_test(g0, g1));
  }
  return report;
}

namespace {

std::string metric_str(const std::optional<double>& m) {
  if (!m) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *m);
  return buf;
}

constexpr const char* kFeatureNames[4] = {"robust_scale", "robust_location",
                                          "variance", "autocovariance"};

}  // namespace

std::string report_to_text(const EvaluationReport& report) {
  std::ostringstream out;
  out << "pooled confusion matrix: tp=" << report.pooled.tp
      << " fp=" << report.pooled.fp << " tn=" << report.pooled.tn
      << " fn=" << report.pooled.fn << "\n";
  out << "sensitivity: " << metric_str(report.metrics.sensitivity) << "\n";
  out << "specificity: " << metric_str(report.metrics.specificity) << "\n";
  out << "accuracy:    " << metric_str(report.metrics.accuracy) << "\n";
  out << "auc:         " << metric_str(report.auc) << "\n";
  out << "mean prediction latency: " << report.mean_prediction_latency_s
      << " s/row\n";
  out << "per-feature ANOVA (between classes):\n";
  for (size_t f = 0; f < report.anova.size(); ++f) {
    out << "  " << kFeatureNames[f] << ": F=" << report.anova[f].f
        << " p=" << report.anova[f].p
        << (report.anova[f].degenerate ? " (degenerate)" : "") << "\n";
  }
  for (size_t fold = 0; fold < report.per_fold.size(); ++fold) {
    const auto& fm = report.per_fold[fold];
    out << "fold " << fold << ": accuracy " << metric_str(fm.metrics.accuracy)
        << " (tp=" << fm.cm.tp << " fp=" << fm.cm.fp << " tn=" << fm.cm.tn
        << " fn=" << fm.cm.fn << ")\n";
  }
  return out.str();
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  auto opt = [](const std::optional<double>& m) {
    return m ? nlohmann::json(*m) : nlohmann::json(nullptr);
  };
  j["metrics"] = {{"sensitivity", opt(report.metrics.sensitivity)},
                  {"specificity", opt(report.metrics.specificity)},
                  {"accuracy", opt(report.metrics.accuracy)},
                  {"auc", report.auc}};
  j["confusion"] = {{"tp", report.pooled.tp},
                    {"fp", report.pooled.fp},
                    {"tn", report.pooled.tn},
                    {"fn", report.pooled.fn}};
  j["per_fold"] = nlohmann::json::array();
  for (const auto& fm : report.per_fold) {
    j["per_fold"].push_back({{"tp", fm.cm.tp},
                             {"fp", fm.cm.fp},
                             {"tn", fm.cm.tn},
                             {"fn", fm.cm.fn},
                             {"accuracy", opt(fm.metrics.accuracy)}});
  }
  j["anova"] = nlohmann::json::object();
  for (size_t f = 0; f < report.anova.size(); ++f) {
    j["anova"][kFeatureNames[f]] = {{"F", report.anova[f].f},
                                    {"p", report.anova[f].p},
                                    {"degenerate", report.anova[f].degenerate}};
  }
  j["latency"] = {{"mean_prediction_s", report.mean_prediction_latency_s}};
  return j.dump(2);
}

void write_roc_csv(std::span<const double> scores, std::span<const int> labels,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ROC file: " + path.string());
  out << "fpr,tpr,threshold\n";

  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  int64_t p = 0, n = 0;
  for (int l : labels) (l == 1 ? p : n)++;
  out << "0,0,inf\n";
  for (double t : thresholds) {
    int64_t tp = 0, fp = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] == 1 ? tp : fp)++;
    }
    out << (n ? static_cast<double>(fp) / n : 0.0) << ','
        << (p ? static_cast<double>(tp) / p : 0.0) << ',' << t << '\n';
  }
}

}  // namespace fatigue::evaluation
