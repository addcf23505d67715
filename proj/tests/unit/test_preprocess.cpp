#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gazenet/preprocess.hpp"

using namespace gazenet;

namespace {

std::vector<std::size_t> flagged_indices(const ArtifactScan& scan) {
  std::vector<std::size_t> out;
  for (const auto& s : scan.spans) {
    for (std::size_t i = s.begin; i < s.end; ++i) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("clamping") {
    GazeRecording rec = fixtures::constant_recording(3);
    rec.samples[0].x_px = 2010;
    rec.samples[1].x_px = -5;
    const auto out = clamp_to_screen(rec);
    CHECK(out.samples[0].x_px == 1920);
    CHECK(out.samples[1].x_px == 0);
    CHECK(out.samples[2].x_px == 960);
    CHECK(out.samples[2].y_px == 540);
  }

  TEST_CASE("annotated blink span is flagged") {
    GazeRecording rec = fixtures::constant_recording(1000);
    rec.events.push_back({EventKind::Blink, 1000.0, 1160.0});
    const auto scan = detect_artifacts(rec);
    REQUIRE(scan.spans.size() == 1);
    CHECK(scan.spans[0].begin == 500);
    CHECK(scan.spans[0].end == 581);  // 1000..1160 ms inclusive at 2 ms spacing
  }

  TEST_CASE("single-sample jump is flagged, against a hand oracle") {
    GazeRecording rec = fixtures::constant_recording(1000);
    rec.samples[400].x_px += 100.0;
    const auto idx = flagged_indices(detect_artifacts(rec));
    // Oracle: incoming speeds are 50 px/ms at 400 and 401, zero elsewhere.
    const double n = 999.0;
    const double mean = 100.0 / n;
    const double var = (2.0 * (50.0 - mean) * (50.0 - mean) + (n - 2.0) * mean * mean) / n;
    REQUIRE(50.0 > mean + 3.0 * std::sqrt(var));
    CHECK(idx == std::vector<std::size_t>{400, 401});
  }

  TEST_CASE("constant gaze has no artifacts") {
    const auto scan = detect_artifacts(fixtures::constant_recording(500));
    CHECK(scan.spans.empty());
    CHECK(scan.zero_speed_variance);
  }

  TEST_CASE("invalid samples are flagged and excluded from speed statistics") {
    GazeRecording rec = fixtures::constant_recording(200);
    for (std::size_t i = 0; i < 200; ++i) rec.samples[i].x_px = 960 + (i % 2);
    rec.samples[50] = {rec.samples[50].t_ms, 0.0, 0.0, false};
    const auto scan = detect_artifacts(rec);
    const auto idx = flagged_indices(scan);
    CHECK(idx == std::vector<std::size_t>{50});
    CHECK(scan.speed_mean == doctest::Approx(0.5));
  }

  TEST_CASE("interpolation midpoint and edge hold") {
    GazeRecording rec = fixtures::constant_recording(3, 0.0, 0.0, 1000.0);
    rec.samples[2].x_px = 10.0;
    auto out = interpolate_artifacts(rec, {{1, 2}});
    CHECK(out.rec.samples[1].x_px == doctest::Approx(5.0));
    CHECK(out.mask == std::vector<std::uint8_t>{0, 1, 0});

    GazeRecording lead = fixtures::constant_recording(4, 0.0, 0.0, 1000.0);
    lead.samples[2].x_px = 3.0;
    lead.samples[3].x_px = 4.0;
    out = interpolate_artifacts(lead, {{0, 2}});
    CHECK(out.rec.samples[0].x_px == 3.0);
    CHECK(out.rec.samples[1].x_px == 3.0);
    CHECK_THROWS_AS(interpolate_artifacts(lead, {{0, 4}}), PreprocessError);
  }

  TEST_CASE("interpolation matches an independent oracle off and on the mask") {
    Rng rng(9);
    GazeRecording rec = fixtures::constant_recording(2000);
    for (auto& s : rec.samples) {
      s.x_px = rng.uniform(0, 1920);
      s.y_px = rng.uniform(0, 1080);
    }
    std::vector<SampleSpan> spans;
    for (std::size_t i = 0; i < 2000; ++i) {
      if (rng.bernoulli(0.1)) spans.push_back({i, i + 1});
    }
    spans = merge_spans(spans);
    const auto out = interpolate_artifacts(rec, spans);
    for (std::size_t i = 0; i < 2000; ++i) {
      const auto& s = out.rec.samples[i];
      REQUIRE(std::isfinite(s.x_px));
      if (!out.mask[i]) {
        CHECK(s.x_px == rec.samples[i].x_px);
        continue;
      }
      long lo = static_cast<long>(i), hi = static_cast<long>(i);
      while (lo >= 0 && out.mask[static_cast<std::size_t>(lo)]) --lo;
      while (hi < 2000 && out.mask[static_cast<std::size_t>(hi)]) ++hi;
      double expect;
      if (lo < 0) {
        expect = rec.samples[static_cast<std::size_t>(hi)].x_px;
      } else if (hi >= 2000) {
        expect = rec.samples[static_cast<std::size_t>(lo)].x_px;
      } else {
        const auto& a = rec.samples[static_cast<std::size_t>(lo)];
        const auto& b = rec.samples[static_cast<std::size_t>(hi)];
        expect = a.x_px + (b.x_px - a.x_px) * (s.t_ms - a.t_ms) / (b.t_ms - a.t_ms);
      }
      CHECK(s.x_px == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("normalization maps the screen onto [-1,1]^2") {
    GazeRecording rec = fixtures::constant_recording(3);
    rec.samples[1] = {2.0, 1920, 1080, true};
    rec.samples[2] = {4.0, 0, 540, true};
    const auto out = normalize_coords(MaskedRecording{rec, {0, 0, 0}});
    CHECK(out.rec.samples[0].x_px == 0.0);
    CHECK(out.rec.samples[0].y_px == 0.0);
    CHECK(out.rec.samples[1].x_px == 1.0);
    CHECK(out.rec.samples[1].y_px == 1.0);
    CHECK(out.rec.samples[2].x_px == -1.0);
    CHECK(out.rec.samples[2].y_px == 0.0);
  }

  TEST_CASE("downsampling by pair means") {
    GazeRecording rec = fixtures::constant_recording(4);
    for (std::size_t i = 0; i < 4; ++i) rec.samples[i].x_px = 2.0 * static_cast<double>(i);
    auto out = downsample(MaskedRecording{rec, std::vector<std::uint8_t>(4, 0)});
    CHECK(out.x == std::vector<double>{1.0, 5.0});
    CHECK(out.sample_rate_hz == 250.0);
    CHECK(out.warnings.empty());

    const auto constant = downsample(MaskedRecording{fixtures::constant_recording(6), {}});
    for (double v : constant.x) CHECK(v == 960.0);

    const auto odd = downsample(MaskedRecording{fixtures::constant_recording(5), {}});
    CHECK(odd.size() == 2);
    CHECK(odd.warnings.size() == 1);
  }

  TEST_CASE("clean recording: half length, no mask, equals normalize then downsample") {
    GazeRecording rec = fixtures::constant_recording(1000);
    for (std::size_t i = 0; i < 1000; ++i) rec.samples[i].x_px = 900.0 + 0.1 * static_cast<double>(i % 7);
    const auto out = preprocess_participant(rec);
    CHECK(out.size() == 500);
    for (auto m : out.interpolated) CHECK(m == 0);
    const auto direct = downsample(normalize_coords(MaskedRecording{rec, std::vector<std::uint8_t>(1000, 0)}));
    CHECK(out.x == direct.x);
    CHECK(out.y == direct.y);
  }

  TEST_CASE("blink marks exactly the overlapping output samples") {
    GazeRecording rec = fixtures::constant_recording(1000);
    rec.events.push_back({EventKind::Blink, 101.0, 203.0});
    const auto out = preprocess_participant(rec);
    // Input samples 51..101 are flagged; output sample o covers inputs 2o, 2o+1.
    for (std::size_t o = 0; o < out.size(); ++o) {
      const bool expect = (2 * o + 1 >= 51) && (2 * o <= 101);
      CHECK(static_cast<bool>(out.interpolated[o]) == expect);
    }
  }

  TEST_CASE("mostly flagged recording sets the exclusion flag") {
    GazeRecording rec = fixtures::constant_recording(1000);
    rec.events.push_back({EventKind::Blink, 0.0, 1200.0});
    const auto out = preprocess_participant(rec);
    CHECK(out.flagged_for_exclusion);
    CHECK(out.interpolated_fraction > 0.5);
  }

  TEST_CASE("output is finite, bounded and deterministic") {
    Rng rng(4);
    GazeRecording rec = fixtures::constant_recording(3000);
    for (auto& s : rec.samples) {
      s.x_px = rng.uniform(-200, 2200);
      s.y_px = rng.uniform(-100, 1200);
      s.valid = !rng.bernoulli(0.02);
    }
    const auto a = preprocess_participant(rec);
    const auto b = preprocess_participant(rec);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::isfinite(a.x[i]));
      CHECK((a.x[i] >= -1.0 && a.x[i] <= 1.0 && a.y[i] >= -1.0 && a.y[i] <= 1.0));
    }
  }

  TEST_CASE("clean cache round trip") {
    fixtures::TempDir dir("clean_rt");
    GazeRecording rec = fixtures::constant_recording(400);
    rec.events.push_back({EventKind::Blink, 100.0, 140.0});
    for (std::size_t i = 0; i < 400; ++i) rec.samples[i].y_px = 500.0 + 0.37 * static_cast<double>(i);
    const auto a = preprocess_participant(rec);
    write_clean(dir / "P.csv", a);
    const auto b = read_clean(dir / "P.csv", "P");
    CHECK(a.t_ms == b.t_ms);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.interpolated == b.interpolated);
  }
}
