#include "fatigue/stream.hpp"

#include <chrono>
#include <thread>

#include "fatigue/features.hpp"
#include "fatigue/stats.hpp"

namespace fatigue::stream {

StreamReport stream_recording(const io::Recording& rec,
                              const ensemble::BaggedModel& model,
                              bool realtime) {
  const io::ChannelView ch = io::channel(rec, model.channel_name);
  const auto windows =
      features::segment_windows(ch.data.size(), ch.sample_rate_hz, model.window);
  mcd::MCDConfig mcfg;
  mcfg.alpha = model.alpha;

  StreamReport report;
  report.decisions.reserve(windows.size());
  double total_s = 0.0;

  const auto replay_start = std::chrono::steady_clock::now();
  for (const auto& [start, end] : windows) {
    const double window_end_s = static_cast<double>(end) / ch.sample_rate_hz;
    if (realtime) {
      // Wait until the last sample of this window would have arrived.
      const auto due = replay_start + std::chrono::duration_cast<
                                          std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(window_end_s));
      std::this_thread::sleep_until(due);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::span<const double> seg = ch.data.subspan(start, end - start);
    const mcd::RobustEstimate rob = mcd::robust_estimate(seg, mcfg);
    const std::array<double, 4> row = {rob.scaled_scale, rob.location,
                                       stats::sample_variance(seg),
                                       stats::population_autocovariance(seg)};
    const ensemble::Prediction pred = ensemble::predict(model, row);
    const auto t1 = std::chrono::steady_clock::now();

    StreamDecision d;
    d.window_end_time_s = window_end_s;
    d.label = pred.label;
    d.vote_fraction = pred.vote_fraction;
    d.processing_wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    total_s += d.processing_wall_time_s;
    report.max_processing_s = std::max(report.max_processing_s,
                                       d.processing_wall_time_s);
    report.decisions.push_back(d);
  }

  if (!report.decisions.empty())
    report.mean_processing_s = total_s / static_cast<double>(report.decisions.size());
  report.detection_delay_s = model.window.window_s + report.mean_processing_s;
  return report;
}

}  // namespace fatigue::stream
