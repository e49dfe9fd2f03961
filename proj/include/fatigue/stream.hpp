#pragma once

#include <vector>

#include "fatigue/ensemble.hpp"
#include "fatigue/signal_io.hpp"

namespace fatigue::stream {

struct StreamDecision {
  double window_end_time_s = 0.0;
  int label = 0;
  double vote_fraction = 0.0;
  double processing_wall_time_s = 0.0;
};

struct StreamReport {
  std::vector<StreamDecision> decisions;  // chronological order
  double mean_processing_s = 0.0;
  double max_processing_s = 0.0;
  // Decision readiness from window start: window length + mean processing.
  double detection_delay_s = 0.0;
};

// Replays the recording window-by-window with the model's frozen windowing,
// normalizer, and MCD coverage; one decision per window step. With
// `realtime` the replay is paced at the recording's own rate. Decisions are
// identical to batch extraction + prediction on the same recording.
StreamReport stream_recording(const io::Recording& rec,
                              const ensemble::BaggedModel& model,
                              bool realtime = false);

}  // namespace fatigue::stream
