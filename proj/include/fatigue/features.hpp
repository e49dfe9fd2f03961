#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fatigue/mcd.hpp"
#include "fatigue/signal_io.hpp"

namespace fatigue::features {

struct WindowingConfig {
  double window_s = 2.0;
  double step_s = 0.5;
};

// Per-window feature tuple [robust scale, robust location, variance,
// autocovariance], in that canonical order.
struct FeatureVector {
  double robust_scale = 0.0;
  double robust_location = 0.0;
  double variance = 0.0;
  double autocovariance = 0.0;
  double window_start_s = 0.0;

  std::array<double, 4> as_array() const {
    return {robust_scale, robust_location, variance, autocovariance};
  }
};

// Per-feature min/max fitted on training rows, both classes pooled.
struct Normalizer {
  std::array<double, 4> min{};
  std::array<double, 4> max{};
};

struct LabeledDataset {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;          // 0 alert, 1 fatigue
  std::vector<int> recording_ids;   // provenance, for grouped splitting

  size_t size() const { return rows.size(); }
};

struct ChannelSelection {
  int index = 0;
  std::string name;
  double variance = 0.0;
};

// Argmax of per-channel sample variance; ties go to the lowest index.
ChannelSelection select_max_variance_channel(const io::Recording& rec);

// Aggregate selection across recordings: highest mean rank of variance
// wins (rank 1 = lowest variance within a recording).
std::string select_channel_by_rank(
    const std::vector<std::pair<io::Recording, int>>& recordings);

// Half-open [start, end) sample ranges; trailing partial window dropped.
std::vector<std::pair<size_t, size_t>> segment_windows(
    size_t n_samples, double sample_rate_hz, const WindowingConfig& cfg);

std::vector<FeatureVector> extract_window_features(
    const io::ChannelView& ch,
    const std::vector<std::pair<size_t, size_t>>& windows,
    const mcd::MCDConfig& cfg);

Normalizer fit_normalizer(const LabeledDataset& train);

// x' = 2(x-min)/(max-min) - 1; degenerate features map to 0; out-of-range
// inference values clip to +-1.
std::array<double, 4> apply_normalizer(const Normalizer& nz,
                                       const std::array<double, 4>& row);

LabeledDataset build_labeled_dataset(
    const std::vector<std::pair<io::Recording, int>>& recordings,
    const std::string& channel_name, const WindowingConfig& wcfg,
    const mcd::MCDConfig& mcfg);

// Feature CSV:
// window_start_s,robust_scale,robust_location,variance,autocovariance,label,recording_id
void write_feature_csv(const LabeledDataset& ds,
                       const std::filesystem::path& path);
LabeledDataset read_feature_csv(const std::filesystem::path& path);

}  // namespace fatigue::features
