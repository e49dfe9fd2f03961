#include "fatigue/signal_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "fatigue/rng.hpp"

namespace fatigue::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_cell(const std::string& cell, size_t row, const std::string& col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || !std::isfinite(v)) {
    throw std::runtime_error("non-numeric value '" + cell + "' at data row " +
                             std::to_string(row) + ", column " + col);
  }
  return v;
}

}  // namespace

Recording load_recording_csv(const std::filesystem::path& path,
                             double sample_rate_hz) {
  if (sample_rate_hz <= 0.0)
    throw std::invalid_argument("sample rate must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open recording file: " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty recording file: " + path.string());
  const std::vector<std::string> names = split_csv_line(strip_cr(line));
  if (names.empty())
    throw std::runtime_error("empty header in " + path.string());

  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second)
      throw std::runtime_error("duplicate channel name '" + n + "' in " +
                               path.string());
  }

  const size_t m = names.size();
  Recording rec;
  rec.channel_names = names;
  rec.samples.assign(m, {});
  rec.sample_rate_hz = sample_rate_hz;

  size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != m) {
      throw std::runtime_error("ragged row " + std::to_string(row) + " in " +
                               path.string() + ": expected " +
                               std::to_string(m) + " cells, got " +
                               std::to_string(cells.size()));
    }
    for (size_t c = 0; c < m; ++c)
      rec.samples[c].push_back(parse_cell(cells[c], row, names[c]));
  }

  if (row < 2)
    throw std::runtime_error("recording " + path.string() +
                             " has fewer than 2 samples");
  return rec;
}

void write_recording_csv(const Recording& rec,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write recording file: " + path.string());
  for (size_t c = 0; c < rec.channel_names.size(); ++c) {
    if (c) out << ',';
    out << rec.channel_names[c];
  }
  out << '\n';
  char buf[40];
  const size_t n = rec.sample_count();
  for (size_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < rec.samples.size(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", rec.samples[c][i]);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<std::pair<Recording, int>> generate_synthetic(const SynthSpec& spec) {
  if (spec.n_subjects < 1)
    throw std::invalid_argument("n_subjects must be positive");
  if (!(spec.fatigue_std_uv > spec.alert_std_uv))
    throw std::invalid_argument("fatigue_std_uv must exceed alert_std_uv");
  if (spec.fatigue_outlier_rate < 0.0 || spec.fatigue_outlier_rate >= 1.0)
    throw std::invalid_argument("fatigue_outlier_rate must be in [0,1)");
  const size_t n = static_cast<size_t>(
      std::llround(spec.duration_s * spec.sample_rate_hz));
  if (n < 2) throw std::invalid_argument("duration too short for sample rate");

  std::vector<std::pair<Recording, int>> out;
  out.reserve(2 * static_cast<size_t>(spec.n_subjects));
  for (int subject = 0; subject < 2 * spec.n_subjects; ++subject) {
    const int label = subject < spec.n_subjects ? 0 : 1;
    const double std_uv = label ? spec.fatigue_std_uv : spec.alert_std_uv;
    SplitMix64 rng(derive_stream_seed(spec.seed, static_cast<uint64_t>(subject)));

    std::vector<double> data(n);
    for (size_t i = 0; i < n; ++i) data[i] = std_uv * rng.next_normal();
    if (label) {
      for (size_t i = 0; i < n; ++i) {
        if (rng.next_double() < spec.fatigue_outlier_rate) {
          const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
          data[i] = sign * 10.0 * spec.fatigue_std_uv;
        }
      }
    }

    Recording rec;
    rec.channel_names = {"TP7"};
    rec.samples.push_back(std::move(data));
    rec.sample_rate_hz = spec.sample_rate_hz;
    out.emplace_back(std::move(rec), label);
  }
  return out;
}

ChannelView channel(const Recording& rec, const std::string& name) {
  for (size_t c = 0; c < rec.channel_names.size(); ++c) {
    if (rec.channel_names[c] == name) {
      return ChannelView{name, std::span<const double>(rec.samples[c]),
                         rec.sample_rate_hz};
    }
  }
  std::string avail;
  for (size_t c = 0; c < rec.channel_names.size(); ++c) {
    if (c) avail += ", ";
    avail += rec.channel_names[c];
  }
  throw std::runtime_error("unknown channel '" + name +
                           "'; available channels: " + avail);
}

}  // namespace fatigue::io
