#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fatigue/ensemble.hpp"
#include "fatigue/features.hpp"

namespace fatigue::evaluation {

// Positive class = fatigue = 1.
struct ConfusionMatrix {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
  void add(int truth, int predicted) {
    if (truth == 1)
      predicted == 1 ? ++tp : ++fn;
    else
      predicted == 1 ? ++fp : ++tn;
  }
};

// Metrics with undefined denominators reported as nullopt, never as 0.
struct Metrics {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> accuracy;
};

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  bool degenerate = false;  // zero within-group variance
};

enum class FoldGrouping { Row, Recording };

struct FoldMetrics {
  ConfusionMatrix cm;
  Metrics metrics;
};

struct EvaluationReport {
  ConfusionMatrix pooled;
  Metrics metrics;  // from the pooled confusion matrix
  double auc = 0.0;
  std::vector<FoldMetrics> per_fold;
  std::vector<AnovaResult> anova;  // per raw feature, canonical order
  double mean_prediction_latency_s = 0.0;
  std::vector<double> scores;  // pooled vote fractions, dataset row order
  std::vector<int> predicted;  // pooled predictions, dataset row order
};

// Seeded shuffled k-fold partition of row indices. Recording grouping keeps
// all windows of one recording in one fold.
std::vector<std::vector<size_t>> kfold_split(
    const features::LabeledDataset& dataset, int k, uint64_t seed,
    FoldGrouping grouping);

Metrics confusion_metrics(const ConfusionMatrix& cm);

// Rank-based (Mann-Whitney) AUC, ties counted 1/2. Needs both classes.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// One-way ANOVA between two groups, df (1, n-2).
AnovaResult anova_f_test(std::span<const double> group0,
                         std::span<const double> group1);

// Per fold: normalizer and ensemble fit on the training split only, scored
// on the held-out split; confusion matrices pooled, AUC from pooled scores,
// ANOVA on each raw feature between classes over the full dataset.
EvaluationReport cross_validate(const features::LabeledDataset& dataset,
                                const ensemble::EnsembleConfig& cfg, int k,
                                uint64_t seed, FoldGrouping grouping);

std::string report_to_text(const EvaluationReport& report);
std::string report_to_json(const EvaluationReport& report);

// ROC curve points "fpr,tpr,threshold", thresholds descending.
void write_roc_csv(std::span<const double> scores, std::span<const int> labels,
                   const std::filesystem::path& path);

}  // namespace fatigue::evaluation
