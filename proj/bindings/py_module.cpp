#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fatigue/ensemble.hpp"
#include "fatigue/evaluation.hpp"
#include "fatigue/features.hpp"
#include "fatigue/mcd.hpp"
#include "fatigue/signal_io.hpp"
#include "fatigue/stats.hpp"
#include "fatigue/stream.hpp"

namespace py = pybind11;
using namespace fatigue;

namespace {

features::LabeledDataset dataset_from_rows(
    const std::vector<std::array<double, 4>>& rows,
    const std::vector<int>& labels, const std::vector<int>& recording_ids) {
  if (rows.size() != labels.size())
    throw std::invalid_argument("rows and labels must have equal length");
  features::LabeledDataset ds;
  for (size_t i = 0; i < rows.size(); ++i) {
    features::FeatureVector fv;
    fv.robust_scale = rows[i][0];
    fv.robust_location = rows[i][1];
    fv.variance = rows[i][2];
    fv.autocovariance = rows[i][3];
    ds.rows.push_back(fv);
    ds.labels.push_back(labels[i]);
    ds.recording_ids.push_back(
        recording_ids.empty() ? static_cast<int>(i) : recording_ids.at(i));
  }
  return ds;
}

}  // namespace

PYBIND11_MODULE(_fatigue, m) {
  m.doc() = "Single-channel EEG fatigue detection: robust windowed features "
            "and bagged decision trees";

  // stats
  m.def("mean", [](const std::vector<double>& v) { return stats::mean(v); });
  m.def("sample_variance",
        [](const std::vector<double>& v) { return stats::sample_variance(v); });
  m.def("population_autocovariance", [](const std::vector<double>& v) {
    return stats::population_autocovariance(v);
  });
  m.def("chi_square_cdf", &stats::chi_square_cdf, py::arg("x"), py::arg("k"));
  m.def("chi_square_quantile", &stats::chi_square_quantile, py::arg("q"),
        py::arg("k"));

  // mcd
  py::class_<mcd::RobustEstimate>(m, "RobustEstimate")
      .def_readonly("location", &mcd::RobustEstimate::location)
      .def_readonly("raw_scale", &mcd::RobustEstimate::raw_scale)
      .def_readonly("consistency_factor", &mcd::RobustEstimate::consistency_factor)
      .def_readonly("scaled_scale", &mcd::RobustEstimate::scaled_scale)
      .def_readonly("h", &mcd::RobustEstimate::h)
      .def_readonly("subset_start", &mcd::RobustEstimate::subset_start);
  m.def("choose_h", &mcd::choose_h, py::arg("n"), py::arg("alpha"));
  m.def("consistency_factor", &mcd::consistency_factor, py::arg("alpha"),
        py::arg("p") = 1);
  m.def(
      "robust_estimate",
      [](const std::vector<double>& data, double alpha) {
        mcd::MCDConfig cfg;
        cfg.alpha = alpha;
        return mcd::robust_estimate(data, cfg);
      },
      py::arg("data"), py::arg("alpha") = 0.5);

  // signal io
  py::class_<io::Recording>(m, "Recording")
      .def_readonly("channel_names", &io::Recording::channel_names)
      .def_readonly("samples", &io::Recording::samples)
      .def_readonly("sample_rate_hz", &io::Recording::sample_rate_hz);
  py::class_<io::SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("n_subjects", &io::SynthSpec::n_subjects)
      .def_readwrite("duration_s", &io::SynthSpec::duration_s)
      .def_readwrite("sample_rate_hz", &io::SynthSpec::sample_rate_hz)
      .def_readwrite("alert_std_uv", &io::SynthSpec::alert_std_uv)
      .def_readwrite("fatigue_std_uv", &io::SynthSpec::fatigue_std_uv)
      .def_readwrite("fatigue_outlier_rate", &io::SynthSpec::fatigue_outlier_rate)
      .def_readwrite("seed", &io::SynthSpec::seed);
  m.def("load_recording_csv", &io::load_recording_csv, py::arg("path"),
        py::arg("sample_rate_hz"));
  m.def("generate_synthetic", &io::generate_synthetic, py::arg("spec"));

  // features
  py::class_<features::FeatureVector>(m, "FeatureVector")
      .def_readonly("robust_scale", &features::FeatureVector::robust_scale)
      .def_readonly("robust_location", &features::FeatureVector::robust_location)
      .def_readonly("variance", &features::FeatureVector::variance)
      .def_readonly("autocovariance", &features::FeatureVector::autocovariance)
      .def_readonly("window_start_s", &features::FeatureVector::window_start_s)
      .def("as_array", &features::FeatureVector::as_array);
  py::class_<features::LabeledDataset>(m, "LabeledDataset")
      .def_readonly("rows", &features::LabeledDataset::rows)
      .def_readonly("labels", &features::LabeledDataset::labels)
      .def_readonly("recording_ids", &features::LabeledDataset::recording_ids)
      .def("__len__", &features::LabeledDataset::size);
  m.def("select_max_variance_channel", [](const io::Recording& rec) {
    const auto sel = features::select_max_variance_channel(rec);
    return py::make_tuple(sel.index, sel.name, sel.variance);
  });
  m.def(
      "segment_windows",
      [](size_t n_samples, double rate_hz, double window_s, double step_s) {
        return features::segment_windows(n_samples, rate_hz,
                                         {window_s, step_s});
      },
      py::arg("n_samples"), py::arg("sample_rate_hz"),
      py::arg("window_s") = 2.0, py::arg("step_s") = 0.5);
  m.def(
      "build_labeled_dataset",
      [](const std::vector<std::pair<io::Recording, int>>& recs,
         const std::string& channel, double window_s, double step_s,
         double alpha) {
        mcd::MCDConfig mcfg;
        mcfg.alpha = alpha;
        return features::build_labeled_dataset(recs, channel,
                                               {window_s, step_s}, mcfg);
      },
      py::arg("recordings"), py::arg("channel"), py::arg("window_s") = 2.0,
      py::arg("step_s") = 0.5, py::arg("alpha") = 0.5);

  // ensemble
  py::class_<ensemble::BaggedModel>(m, "BaggedModel")
      .def_property_readonly("ensemble_size", &ensemble::BaggedModel::ensemble_size)
      .def_readonly("channel_name", &ensemble::BaggedModel::channel_name)
      .def_readonly("seed", &ensemble::BaggedModel::seed);
  m.def(
      "train_ensemble",
      [](const std::vector<std::array<double, 4>>& rows,
         const std::vector<int>& labels, int trees, uint64_t seed) {
        const auto ds = dataset_from_rows(rows, labels, {});
        ensemble::EnsembleConfig cfg;
        cfg.trees = trees;
        cfg.seed = seed;
        return std::make_unique<ensemble::BaggedModel>(ensemble::train_ensemble(
            ds, features::fit_normalizer(ds), cfg, "", {}, 0.5));
      },
      py::arg("rows"), py::arg("labels"), py::arg("trees") = 30,
      py::arg("seed") = 42);
  m.def(
      "train_on_dataset",
      [](const features::LabeledDataset& ds, const std::string& channel,
         int trees, uint64_t seed, double window_s, double step_s,
         double alpha) {
        ensemble::EnsembleConfig cfg;
        cfg.trees = trees;
        cfg.seed = seed;
        return std::make_unique<ensemble::BaggedModel>(ensemble::train_ensemble(
            ds, features::fit_normalizer(ds), cfg, channel,
            {window_s, step_s}, alpha));
      },
      py::arg("dataset"), py::arg("channel") = "", py::arg("trees") = 30,
      py::arg("seed") = 42, py::arg("window_s") = 2.0, py::arg("step_s") = 0.5,
      py::arg("alpha") = 0.5);
  m.def(
      "predict",
      [](const ensemble::BaggedModel& model, const std::array<double, 4>& row) {
        const auto p = ensemble::predict(model, row);
        return py::make_tuple(p.label, p.vote_fraction);
      },
      py::arg("model"), py::arg("row"));
  m.def("serialize_model",
        [](const ensemble::BaggedModel& m_) { return ensemble::serialize(m_); });
  m.def("deserialize_model", [](const std::string& text) {
    return std::make_unique<ensemble::BaggedModel>(ensemble::deserialize(text));
  });
  m.def("save_model", &ensemble::save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", [](const std::filesystem::path& path) {
    return std::make_unique<ensemble::BaggedModel>(ensemble::load_model(path));
  }, py::arg("path"));

  // evaluation
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return evaluation::roc_auc(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "anova_f_test",
      [](const std::vector<double>& g0, const std::vector<double>& g1) {
        const auto r = evaluation::anova_f_test(g0, g1);
        return py::make_tuple(r.f, r.p);
      },
      py::arg("group0"), py::arg("group1"));
  m.def(
      "cross_validate",
      [](const features::LabeledDataset& ds, int trees, int k, uint64_t seed,
         const std::string& split) {
        ensemble::EnsembleConfig cfg;
        cfg.trees = trees;
        cfg.seed = seed;
        const auto grouping = split == "row"
                                  ? evaluation::FoldGrouping::Row
                                  : evaluation::FoldGrouping::Recording;
        const auto r = evaluation::cross_validate(ds, cfg, k, seed, grouping);
        py::dict out;
        out["accuracy"] = r.metrics.accuracy ? py::object(py::float_(*r.metrics.accuracy))
                                             : py::object(py::none());
        out["sensitivity"] = r.metrics.sensitivity
                                 ? py::object(py::float_(*r.metrics.sensitivity))
                                 : py::object(py::none());
        out["specificity"] = r.metrics.specificity
                                 ? py::object(py::float_(*r.metrics.specificity))
                                 : py::object(py::none());
        out["auc"] = r.auc;
        py::list anova;
        for (const auto& a : r.anova) anova.append(py::make_tuple(a.f, a.p));
        out["anova"] = anova;
        out["scores"] = r.scores;
        return out;
      },
      py::arg("dataset"), py::arg("trees") = 30, py::arg("k") = 10,
      py::arg("seed") = 42, py::arg("split") = "recording");

  // stream
  m.def(
      "stream_recording",
      [](const io::Recording& rec, const ensemble::BaggedModel& model) {
        const auto r = stream::stream_recording(rec, model, false);
        py::list decisions;
        for (const auto& d : r.decisions)
          decisions.append(py::make_tuple(d.window_end_time_s, d.label,
                                          d.vote_fraction,
                                          d.processing_wall_time_s));
        py::dict out;
        out["decisions"] = decisions;
        out["mean_processing_s"] = r.mean_processing_s;
        out["max_processing_s"] = r.max_processing_s;
        out["detection_delay_s"] = r.detection_delay_s;
        return out;
      },
      py::arg("recording"), py::arg("model"));
}
