#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fatigue/ensemble.hpp"
#include "fatigue/evaluation.hpp"
#include "fatigue/features.hpp"
#include "fatigue/signal_io.hpp"
#include "fatigue/stream.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fatigue;

namespace {

struct SharedOpts {
  double rate_hz = 1000.0;
  double window_s = 2.0;
  double step_s = 0.5;
  double alpha = 0.5;
  int trees = 30;
  int k = 10;
  uint64_t seed = 42;
  std::string split = "recording";
  std::string tie = "alert";
};

void add_shared(CLI::App* cmd, SharedOpts& o) {
  cmd->add_option("--rate-hz", o.rate_hz, "Sampling rate of CSV recordings");
  cmd->add_option("--window-s", o.window_s, "Sliding window length, seconds");
  cmd->add_option("--step-s", o.step_s, "Sliding window step, seconds");
  cmd->add_option("--alpha", o.alpha, "MCD coverage fraction in [0.5, 1]");
  cmd->add_option("--trees", o.trees, "Ensemble size");
  cmd->add_option("--k", o.k, "Cross-validation folds");
  cmd->add_option("--seed", o.seed, "Seed for all randomness");
  cmd->add_option("--split", o.split, "Fold grouping: row | recording")
      ->check(CLI::IsMember({"row", "recording"}));
  cmd->add_option("--tie", o.tie, "Vote-tie class: alert | fatigue")
      ->check(CLI::IsMember({"alert", "fatigue"}));
}

// Labels file: one "path,label" line per recording, optional header,
// paths resolved relative to the labels file.
std::vector<std::pair<io::Recording, int>> load_labeled_recordings(
    const fs::path& labels_path, double rate_hz) {
  std::ifstream in(labels_path);
  if (!in)
    throw std::runtime_error("cannot open labels file: " + labels_path.string());
  std::vector<std::pair<io::Recording, int>> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error("labels file " + labels_path.string() + " line " +
                               std::to_string(lineno) + ": expected 'path,label'");
    const std::string path_str = line.substr(0, comma);
    const std::string label_str = line.substr(comma + 1);
    if (lineno == 1 && path_str == "path" && label_str == "label") continue;
    int label;
    try {
      label = std::stoi(label_str);
    } catch (const std::exception&) {
      throw std::runtime_error("labels file line " + std::to_string(lineno) +
                               ": label '" + label_str + "' is not an integer");
    }
    if (label != 0 && label != 1)
      throw std::runtime_error("labels file line " + std::to_string(lineno) +
                               ": label must be 0 or 1");
    fs::path rec_path(path_str);
    if (rec_path.is_relative()) rec_path = labels_path.parent_path() / rec_path;
    out.emplace_back(io::load_recording_csv(rec_path, rate_hz), label);
  }
  if (out.empty())
    throw std::runtime_error("labels file " + labels_path.string() +
                             " lists no recordings");
  return out;
}

std::string pick_channel(
    const std::vector<std::pair<io::Recording, int>>& recs,
    const std::string& requested) {
  if (!requested.empty()) return requested;
  if (recs.size() == 1)
    return features::select_max_variance_channel(recs.front().first).name;
  return features::select_channel_by_rank(recs);
}

nlohmann::json flags_json(const SharedOpts& o) {
  return {{"rate_hz", o.rate_hz}, {"window_s", o.window_s},
          {"step_s", o.step_s},   {"alpha", o.alpha},
          {"trees", o.trees},     {"k", o.k},
          {"seed", o.seed},       {"split", o.split},
          {"tie", o.tie}};
}

ensemble::EnsembleConfig ensemble_config(const SharedOpts& o) {
  ensemble::EnsembleConfig cfg;
  cfg.trees = o.trees;
  cfg.seed = o.seed;
  cfg.tie_class = o.tie == "fatigue" ? 1 : 0;
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Single-channel EEG fatigue detection: robust windowed "
               "features + bagged decision trees"};
  app.require_subcommand(1);

  SharedOpts opts;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  std::string synth_out = "synth_data";
  io::SynthSpec spec;
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--subjects", spec.n_subjects, "Subjects per class");
  synth->add_option("--duration-s", spec.duration_s, "Recording length, seconds");
  synth->add_option("--alert-std", spec.alert_std_uv, "Alert-class std, uV");
  synth->add_option("--fatigue-std", spec.fatigue_std_uv, "Fatigue-class std, uV");
  synth->add_option("--outlier-rate", spec.fatigue_outlier_rate,
                    "Spike fraction in fatigue recordings");
  add_shared(synth, opts);

  // select-channel
  auto* select = app.add_subcommand("select-channel",
                                    "Report the maximum-variance channel");
  std::vector<std::string> select_paths;
  select->add_option("recordings", select_paths, "Recording CSV files")
      ->required()->expected(-1);
  add_shared(select, opts);

  // extract
  auto* extract = app.add_subcommand("extract",
                                     "Extract windowed features to CSV");
  std::string extract_labels, extract_out = "features.csv", extract_channel;
  extract->add_option("--labels", extract_labels, "Labels file (path,label rows)")
      ->required();
  extract->add_option("--out", extract_out, "Feature CSV output path");
  extract->add_option("--channel", extract_channel,
                      "Channel name (default: max-variance selection)");
  add_shared(extract, opts);

  // train
  auto* train = app.add_subcommand("train", "Train a bagged-trees model");
  std::string train_labels, train_model = "model.json", train_channel;
  train->add_option("--labels", train_labels, "Labels file (path,label rows)")
      ->required();
  train->add_option("--model", train_model, "Model JSON output path");
  train->add_option("--channel", train_channel,
                    "Channel name (default: max-variance selection)");
  add_shared(train, opts);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate",
                                      "k-fold cross-validated evaluation");
  std::string eval_labels, eval_prefix = "report", eval_channel;
  evaluate->add_option("--labels", eval_labels, "Labels file (path,label rows)")
      ->required();
  evaluate->add_option("--out-prefix", eval_prefix,
                       "Prefix for .json/.txt/_roc.csv outputs");
  evaluate->add_option("--channel", eval_channel,
                       "Channel name (default: max-variance selection)");
  add_shared(evaluate, opts);

  // stream
  auto* stream_cmd = app.add_subcommand("stream",
                                        "Replay a recording window-by-window");
  std::string stream_rec, stream_model;
  bool stream_realtime = false;
  std::string stream_out;
  stream_cmd->add_option("recording", stream_rec, "Recording CSV")->required();
  stream_cmd->add_option("--model", stream_model, "Trained model JSON")->required();
  stream_cmd->add_flag("--realtime", stream_realtime,
                       "Pace the replay at the recording's real-time rate");
  stream_cmd->add_option("--out", stream_out, "Optional decision CSV output");
  add_shared(stream_cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad arguments -> exit 2, with usage text
  }

  const features::WindowingConfig wcfg{opts.window_s, opts.step_s};
  mcd::MCDConfig mcfg;
  mcfg.alpha = opts.alpha;

  if (*synth) {
    spec.sample_rate_hz = opts.rate_hz;
    spec.seed = opts.seed;
    fs::create_directories(synth_out);
    const auto recordings = io::generate_synthetic(spec);
    std::ofstream labels(fs::path(synth_out) / "labels.csv");
    labels << "path,label\n";
    int idx = 0;
    for (const auto& [rec, label] : recordings) {
      char name[64];
      std::snprintf(name, sizeof name, "rec_%03d_%s.csv", idx,
                    label ? "fatigue" : "alert");
      io::write_recording_csv(rec, fs::path(synth_out) / name);
      labels << name << ',' << label << '\n';
      ++idx;
    }
    nlohmann::json manifest = flags_json(opts);
    manifest["subjects"] = spec.n_subjects;
    manifest["duration_s"] = spec.duration_s;
    manifest["alert_std_uv"] = spec.alert_std_uv;
    manifest["fatigue_std_uv"] = spec.fatigue_std_uv;
    manifest["fatigue_outlier_rate"] = spec.fatigue_outlier_rate;
    std::ofstream(fs::path(synth_out) / "synth_manifest.json")
        << manifest.dump(2) << '\n';
    std::cout << "wrote " << recordings.size() << " recordings to " << synth_out
              << "\n";
    return 0;
  }

  if (*select) {
    if (select_paths.size() == 1) {
      const io::Recording rec =
          io::load_recording_csv(select_paths.front(), opts.rate_hz);
      const auto sel = features::select_max_variance_channel(rec);
      std::cout << sel.name << "\n";
    } else {
      std::vector<std::pair<io::Recording, int>> recs;
      for (const auto& p : select_paths)
        recs.emplace_back(io::load_recording_csv(p, opts.rate_hz), 0);
      std::cout << features::select_channel_by_rank(recs) << "\n";
    }
    return 0;
  }

  if (*extract) {
    const auto recs = load_labeled_recordings(extract_labels, opts.rate_hz);
    const std::string channel = pick_channel(recs, extract_channel);
    const auto ds = features::build_labeled_dataset(recs, channel, wcfg, mcfg);
    features::write_feature_csv(ds, extract_out);
    std::cout << "channel " << channel << ": wrote " << ds.size()
              << " feature rows to " << extract_out << "\n";
    return 0;
  }

  if (*train) {
    const auto recs = load_labeled_recordings(train_labels, opts.rate_hz);
    const std::string channel = pick_channel(recs, train_channel);
    const auto ds = features::build_labeled_dataset(recs, channel, wcfg, mcfg);
    const features::Normalizer nz = features::fit_normalizer(ds);
    const ensemble::BaggedModel model = ensemble::train_ensemble(
        ds, nz, ensemble_config(opts), channel, wcfg, opts.alpha);
    ensemble::save_model(model, train_model);
    std::cout << "trained " << model.ensemble_size() << " trees on " << ds.size()
              << " rows (channel " << channel << "); model: " << train_model
              << "\n";
    return 0;
  }

  if (*evaluate) {
    const auto recs = load_labeled_recordings(eval_labels, opts.rate_hz);
    const std::string channel = pick_channel(recs, eval_channel);
    const auto ds = features::build_labeled_dataset(recs, channel, wcfg, mcfg);
    const auto grouping = opts.split == "row"
                              ? evaluation::FoldGrouping::Row
                              : evaluation::FoldGrouping::Recording;
    const evaluation::EvaluationReport report = evaluation::cross_validate(
        ds, ensemble_config(opts), opts.k, opts.seed, grouping);

    nlohmann::json j = nlohmann::json::parse(evaluation::report_to_json(report));
    j["invocation"] = flags_json(opts);
    j["invocation"]["channel"] = channel;
    std::ofstream(eval_prefix + ".json") << j.dump(2) << '\n';
    std::ofstream(eval_prefix + ".txt")
        << "channel: " << channel << "\n" << evaluation::report_to_text(report);
    evaluation::write_roc_csv(report.scores, ds.labels, eval_prefix + "_roc.csv");
    std::cout << evaluation::report_to_text(report);
    return 0;
  }

  if (*stream_cmd) {
    const ensemble::BaggedModel model = ensemble::load_model(stream_model);
    const io::Recording rec = io::load_recording_csv(stream_rec, opts.rate_hz);
    const stream::StreamReport report =
        stream::stream_recording(rec, model, stream_realtime);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!stream_out.empty()) {
      file.open(stream_out);
      if (!file) throw std::runtime_error("cannot write " + stream_out);
      out = &file;
    }
    *out << "window_end_s,label,vote_fraction,processing_s\n";
    for (const auto& d : report.decisions) {
      *out << d.window_end_time_s << ',' << d.label << ',' << d.vote_fraction
           << ',' << d.processing_wall_time_s << '\n';
    }
    std::cout << "windows: " << report.decisions.size()
              << "  mean processing: " << report.mean_processing_s
              << " s  max: " << report.max_processing_s
              << " s  detection delay (window + processing): "
              << report.detection_delay_s << " s\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
