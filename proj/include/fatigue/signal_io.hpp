#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fatigue::io {

// Multichannel recording; channels are rows, immutable after construction.
struct Recording {
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> samples;  // M rows of N values, microvolts
  double sample_rate_hz = 0.0;

  size_t channel_count() const { return samples.size(); }
  size_t sample_count() const { return samples.empty() ? 0 : samples[0].size(); }
};

// Non-owning view of one channel row.
struct ChannelView {
  std::string name;
  std::span<const double> data;
  double sample_rate_hz = 0.0;
};

struct SynthSpec {
  int n_subjects = 12;
  double duration_s = 300.0;
  double sample_rate_hz = 1000.0;
  double alert_std_uv = 10.0;
  double fatigue_std_uv = 40.0;
  double fatigue_outlier_rate = 0.01;
  uint64_t seed = 42;
};

// CSV layout: header row of channel names, then one row per time instant,
// one numeric cell per channel. Sampling rate supplied out of band.
Recording load_recording_csv(const std::filesystem::path& path,
                             double sample_rate_hz);

// Inverse of load_recording_csv, values at 17 significant digits.
void write_recording_csv(const Recording& rec,
                         const std::filesystem::path& path);

// 2*n_subjects single-channel recordings with labels: n alert (Gaussian,
// alert_std_uv) and n fatigue (Gaussian, fatigue_std_uv, plus a
// fatigue_outlier_rate fraction of +-10*fatigue_std_uv spikes).
// Bit-reproducible for a given seed.
std::vector<std::pair<Recording, int>> generate_synthetic(const SynthSpec& spec);

// View of the named channel; unknown names throw listing what exists.
ChannelView channel(const Recording& rec, const std::string& name);

}  // namespace fatigue::io
