#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fatigue/signal_io.hpp"
#include "fatigue/stats.hpp"

namespace fs = std::filesystem;
using namespace fatigue;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("load_recording_csv: channels are columns") {
  const auto p = write_temp("rec_basic.csv", "A,B\n1,2\n3,4\n");
  const io::Recording rec = io::load_recording_csv(p, 1000.0);
  CHECK(rec.channel_count() == 2);
  CHECK(rec.sample_count() == 2);
  CHECK(rec.samples[0] == std::vector<double>{1, 3});
  CHECK(rec.samples[1] == std::vector<double>{2, 4});
  CHECK(rec.channel_names == std::vector<std::string>{"A", "B"});
}

TEST_CASE("load_recording_csv: single column, CRLF") {
  const auto p = write_temp("rec_single.csv", "A\r\n0\r\n0\r\n0\r\n");
  const io::Recording rec = io::load_recording_csv(p, 250.0);
  CHECK(rec.channel_count() == 1);
  CHECK(rec.sample_count() == 3);
  CHECK(rec.samples[0] == std::vector<double>{0, 0, 0});
}

TEST_CASE("load_recording_csv: diagnostics") {
  CHECK_THROWS_WITH_AS(
      io::load_recording_csv("/nonexistent/file.csv", 1000.0),
      doctest::Contains("/nonexistent/file.csv"), std::runtime_error);

  const auto bad_cell = write_temp("rec_badcell.csv", "A,B\n1,x\n2,3\n");
  try {
    io::load_recording_csv(bad_cell, 1000.0);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("column B") != std::string::npos);
  }

  const auto ragged = write_temp("rec_ragged.csv", "A,B\n1,2\n3\n");
  CHECK_THROWS_WITH_AS(io::load_recording_csv(ragged, 1000.0),
                       doctest::Contains("ragged row 2"), std::runtime_error);

  const auto dup = write_temp("rec_dup.csv", "A,A\n1,2\n3,4\n");
  CHECK_THROWS_WITH_AS(io::load_recording_csv(dup, 1000.0),
                       doctest::Contains("duplicate channel name 'A'"),
                       std::runtime_error);

  const auto short_rec = write_temp("rec_short.csv", "A\n1\n");
  CHECK_THROWS_WITH_AS(io::load_recording_csv(short_rec, 1000.0),
                       doctest::Contains("fewer than 2 samples"),
                       std::runtime_error);
}

TEST_CASE("write/load round trip") {
  io::Recording rec;
  rec.channel_names = {"TP7", "Oz"};
  rec.samples = {{1.25, -3.5000001, 0.1 + 0.2}, {1e-17, 12345.678901234567, -0.0}};
  rec.sample_rate_hz = 500.0;
  const fs::path p = fs::temp_directory_path() / "rec_roundtrip.csv";
  io::write_recording_csv(rec, p);
  const io::Recording back = io::load_recording_csv(p, 500.0);
  CHECK(back.channel_names == rec.channel_names);
  REQUIRE(back.samples.size() == 2);
  for (size_t c = 0; c < 2; ++c)
    for (size_t i = 0; i < 3; ++i)
      CHECK(back.samples[c][i] == rec.samples[c][i]);
}

TEST_CASE("generate_synthetic: counts, determinism, dispersion") {
  io::SynthSpec spec;
  spec.n_subjects = 1;
  spec.duration_s = 10.0;
  spec.sample_rate_hz = 100.0;
  spec.seed = 7;

  const auto a = io::generate_synthetic(spec);
  REQUIRE(a.size() == 2);
  CHECK(a[0].second == 0);
  CHECK(a[1].second == 1);
  CHECK(a[0].first.sample_count() == 1000);

  const auto b = io::generate_synthetic(spec);
  CHECK(a[0].first.samples[0] == b[0].first.samples[0]);
  CHECK(a[1].first.samples[0] == b[1].first.samples[0]);

  spec.seed = 8;
  const auto c = io::generate_synthetic(spec);
  CHECK(a[0].first.samples[0] != c[0].first.samples[0]);

  // Empirical std of a long alert recording matches its parameter.
  io::SynthSpec big;
  big.n_subjects = 1;
  const auto recs = io::generate_synthetic(big);
  const double sd = std::sqrt(stats::sample_variance(recs[0].first.samples[0]));
  CHECK(sd > 9.5);
  CHECK(sd < 10.5);
}

TEST_CASE("generate_synthetic: precondition checks") {
  io::SynthSpec spec;
  spec.alert_std_uv = 40.0;
  spec.fatigue_std_uv = 10.0;
  CHECK_THROWS_AS(io::generate_synthetic(spec), std::invalid_argument);
  io::SynthSpec rate;
  rate.fatigue_outlier_rate = 1.0;
  CHECK_THROWS_AS(io::generate_synthetic(rate), std::invalid_argument);
}

TEST_CASE("channel view") {
  io::Recording rec;
  rec.channel_names = {"A", "B"};
  rec.samples = {{1, 2, 3}, {4, 5, 6}};
  rec.sample_rate_hz = 10.0;

  const io::ChannelView b = io::channel(rec, "B");
  CHECK(b.name == "B");
  CHECK(b.data.size() == rec.sample_count());
  CHECK(b.sample_rate_hz == rec.sample_rate_hz);
  CHECK(b.data[0] == 4);

  const io::ChannelView a = io::channel(rec, "A");
  CHECK(a.data[2] == 3);

  CHECK_THROWS_WITH_AS(io::channel(rec, "TP7"),
                       doctest::Contains("available channels: A, B"),
                       std::runtime_error);
}
