#include "fatigue/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fatigue/stats.hpp"

namespace fatigue::features {

ChannelSelection select_max_variance_channel(const io::Recording& rec) {
  if (rec.channel_count() < 1)
    throw std::invalid_argument("recording has no channels");
  if (rec.sample_count() < 2)
    throw std::invalid_argument("recording has fewer than 2 samples");
  ChannelSelection best{0, rec.channel_names[0],
                        stats::sample_variance(rec.samples[0])};
  for (size_t c = 1; c < rec.channel_count(); ++c) {
    const double v = stats::sample_variance(rec.samples[c]);
    if (v > best.variance) best = {static_cast<int>(c), rec.channel_names[c], v};
  }
  return best;
}

std::string select_channel_by_rank(
    const std::vector<std::pair<io::Recording, int>>& recordings) {
  if (recordings.empty()) throw std::invalid_argument("no recordings given");
  const auto& names = recordings.front().first.channel_names;
  const size_t m = names.size();
  std::vector<double> rank_sum(m, 0.0);
  for (const auto& [rec, label] : recordings) {
    if (rec.channel_names != names)
      throw std::runtime_error("recordings disagree on channel layout");
    std::vector<double> vars(m);
    for (size_t c = 0; c < m; ++c)
      vars[c] = stats::sample_variance(rec.samples[c]);
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return vars[a] < vars[b]; });
    for (size_t r = 0; r < m; ++r)
      rank_sum[order[r]] += static_cast<double>(r + 1);
  }
  size_t best = 0;
  for (size_t c = 1; c < m; ++c)
    if (rank_sum[c] > rank_sum[best]) best = c;
  return names[best];
}

std::vector<std::pair<size_t, size_t>> segment_windows(
    size_t n_samples, double sample_rate_hz, const WindowingConfig& cfg) {
  const size_t w = static_cast<size_t>(std::llround(cfg.window_s * sample_rate_hz));
  const size_t s = static_cast<size_t>(std::llround(cfg.step_s * sample_rate_hz));
  if (w < 2) throw std::invalid_argument("window shorter than 2 samples");
  if (s < 1) throw std::invalid_argument("step shorter than 1 sample");
  if (n_samples < w)
    throw std::runtime_error("signal shorter than one window (" +
                             std::to_string(n_samples) + " < " +
                             std::to_string(w) + " samples)");
  std::vector<std::pair<size_t, size_t>> windows;
  const size_t count = (n_samples - w) / s + 1;
  windows.reserve(count);
  for (size_t k = 0; k < count; ++k) windows.emplace_back(k * s, k * s + w);
  return windows;
}

std::vector<FeatureVector> extract_window_features(
    const io::ChannelView& ch,
    const std::vector<std::pair<size_t, size_t>>& windows,
    const mcd::MCDConfig& cfg) {
  std::vector<FeatureVector> out;
  out.reserve(windows.size());
  for (const auto& [start, end] : windows) {
    const std::span<const double> seg = ch.data.subspan(start, end - start);
    const mcd::RobustEstimate rob = mcd::robust_estimate(seg, cfg);
    FeatureVector fv;
    fv.robust_scale = rob.scaled_scale;
    fv.robust_location = rob.location;
    fv.variance = stats::sample_variance(seg);
    fv.autocovariance = stats::population_autocovariance(seg);
    fv.window_start_s = static_cast<double>(start) / ch.sample_rate_hz;
    out.push_back(fv);
  }
  return out;
}

Normalizer fit_normalizer(const LabeledDataset& train) {
  if (train.rows.empty())
    throw std::invalid_argument("fit_normalizer: empty dataset");
  Normalizer nz;
  nz.min.fill(std::numeric_limits<double>::infinity());
  nz.max.fill(-std::numeric_limits<double>::infinity());
  for (const FeatureVector& fv : train.rows) {
    const auto row = fv.as_array();
    for (size_t f = 0; f < 4; ++f) {
      nz.min[f] = std::min(nz.min[f], row[f]);
      nz.max[f] = std::max(nz.max[f], row[f]);
    }
  }
  return nz;
}

std::array<double, 4> apply_normalizer(const Normalizer& nz,
                                       const std::array<double, 4>& row) {
  std::array<double, 4> out{};
  for (size_t f = 0; f < 4; ++f) {
    const double range = nz.max[f] - nz.min[f];
    if (range <= 0.0) {
      out[f] = 0.0;
    } else {
      out[f] = std::clamp(2.0 * (row[f] - nz.min[f]) / range - 1.0, -1.0, 1.0);
    }
  }
  return out;
}

LabeledDataset build_labeled_dataset(
    const std::vector<std::pair<io::Recording, int>>& recordings,
    const std::string& channel_name, const WindowingConfig& wcfg,
    const mcd::MCDConfig& mcfg) {
  LabeledDataset ds;
  int rec_id = 0;
  for (const auto& [rec, label] : recordings) {
    const io::ChannelView ch = io::channel(rec, channel_name);
    const auto windows = segment_windows(ch.data.size(), ch.sample_rate_hz, wcfg);
    for (FeatureVector& fv : extract_window_features(ch, windows, mcfg)) {
      ds.rows.push_back(fv);
      ds.labels.push_back(label);
      ds.recording_ids.push_back(rec_id);
    }
    ++rec_id;
  }
  return ds;
}

void write_feature_csv(const LabeledDataset& ds,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature file: " + path.string());
  out << "window_start_s,robust_scale,robust_location,variance,autocovariance,"
         "label,recording_id\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    const FeatureVector& fv = ds.rows[i];
    put(fv.window_start_s); out << ',';
    put(fv.robust_scale); out << ',';
    put(fv.robust_location); out << ',';
    put(fv.variance); out << ',';
    put(fv.autocovariance); out << ',';
    out << ds.labels[i] << ',' << ds.recording_ids[i] << '\n';
  }
}

LabeledDataset read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty feature file: " + path.string());
  LabeledDataset ds;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw std::runtime_error("malformed feature row " + std::to_string(row) +
                               " in " + path.string());
    FeatureVector fv;
    fv.window_start_s = std::stod(cells[0]);
    fv.robust_scale = std::stod(cells[1]);
    fv.robust_location = std::stod(cells[2]);
    fv.variance = std::stod(cells[3]);
    fv.autocovariance = std::stod(cells[4]);
    const int label = std::stoi(cells[5]);
    if (label != 0 && label != 1)
      throw std::runtime_error("label must be 0 or 1 at feature row " +
                               std::to_string(row));
    ds.rows.push_back(fv);
    ds.labels.push_back(label);
    ds.recording_ids.push_back(std::stoi(cells[6]));
  }
  return ds;
}

}  // namespace fatigue::features
