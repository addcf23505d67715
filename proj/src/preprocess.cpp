#include "gazenet/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace gazenet {

GazeRecording clamp_to_screen(const GazeRecording& rec, const ScreenGeometry& geom) {
  GazeRecording out = rec;
  for (auto& s : out.samples) {
    s.x_px = std::clamp(s.x_px, 0.0, geom.width_px);
    s.y_px = std::clamp(s.y_px, 0.0, geom.height_px);
  }
  return out;
}

std::vector<SampleSpan> merge_spans(std::vector<SampleSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    return a.begin < b.begin || (a.begin == b.begin && a.end < b.end);
  });
  std::vector<SampleSpan> out;
  for (const auto& s : spans) {
    if (s.end <= s.begin) continue;
    if (!out.empty() && s.begin <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

ArtifactScan detect_artifacts(const GazeRecording& rec) {
  const auto& s = rec.samples;
  const std::size_t n = s.size();
  if (n < 2) throw PreprocessError(rec.participant_id + ": artifact detection needs at least 2 samples");

  std::vector<std::uint8_t> flagged(n, 0);
  std::vector<SampleSpan> spans;
  for (const auto& e : rec.events) {
    if (e.kind != EventKind::Blink) continue;
    auto lo = std::lower_bound(s.begin(), s.end(), e.start_ms, [](const GazeSample& a, double t) { return a.t_ms < t; });
    auto hi = std::upper_bound(s.begin(), s.end(), e.end_ms, [](double t, const GazeSample& a) { return t < a.t_ms; });
    SampleSpan span{static_cast<std::size_t>(lo - s.begin()), static_cast<std::size_t>(hi - s.begin())};
    for (std::size_t i = span.begin; i < span.end; ++i) flagged[i] = 1;
    spans.push_back(span);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!s[i].valid) {
      flagged[i] = 1;
      spans.push_back({i, i + 1});
    }
  }

  // Speed of the transition arriving at sample i, for i >= 1.
  std::vector<double> speed(n, 0.0);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i < n; ++i) {
    double dx = s[i].x_px - s[i - 1].x_px;
    double dy = s[i].y_px - s[i - 1].y_px;
    speed[i] = std::sqrt(dx * dx + dy * dy) / (s[i].t_ms - s[i - 1].t_ms);
    if (!flagged[i] && !flagged[i - 1]) {
      sum += speed[i];
      ++count;
    }
  }
  ArtifactScan scan;
  if (count > 0) {
    scan.speed_mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (!flagged[i] && !flagged[i - 1]) ss += (speed[i] - scan.speed_mean) * (speed[i] - scan.speed_mean);
    }
    scan.speed_sd = std::sqrt(ss / static_cast<double>(count));
  }
  if (scan.speed_sd == 0.0) {
    scan.zero_speed_variance = true;
  } else {
    const double threshold = scan.speed_mean + kOutlierSigmas * scan.speed_sd;
    for (std::size_t i = 1; i < n; ++i) {
      if (!flagged[i] && speed[i] > threshold) spans.push_back({i, i + 1});
    }
  }
  scan.spans = merge_spans(std::move(spans));
  return scan;
}

MaskedRecording interpolate_artifacts(const GazeRecording& rec, const std::vector<SampleSpan>& spans) {
  const std::size_t n = rec.samples.size();
  MaskedRecording out{rec, std::vector<std::uint8_t>(n, 0)};
  for (const auto& sp : spans) {
    if (sp.end > n || sp.begin > sp.end) throw PreprocessError(rec.participant_id + ": artifact span out of bounds");
    for (std::size_t i = sp.begin; i < sp.end; ++i) out.mask[i] = 1;
  }
  auto& s = out.rec.samples;
  std::size_t prev = n;  // last unflagged index seen, n = none
  std::size_t i = 0;
  bool any_valid = false;
  while (i < n) {
    if (!out.mask[i]) {
      prev = i;
      any_valid = true;
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < n && out.mask[run_end]) ++run_end;
    const bool has_prev = prev != n;
    const bool has_next = run_end < n;
    for (std::size_t k = i; k < run_end; ++k) {
      if (has_prev && has_next) {
        const auto& a = s[prev];
        const auto& b = s[run_end];
        double w = (s[k].t_ms - a.t_ms) / (b.t_ms - a.t_ms);
        s[k].x_px = a.x_px + w * (b.x_px - a.x_px);
        s[k].y_px = a.y_px + w * (b.y_px - a.y_px);
      } else if (has_prev) {
        s[k].x_px = s[prev].x_px;
        s[k].y_px = s[prev].y_px;
      } else if (has_next) {
        s[k].x_px = s[run_end].x_px;
        s[k].y_px = s[run_end].y_px;
      }
      s[k].valid = true;
    }
    i = run_end;
  }
  if (!any_valid && n > 0) throw PreprocessError(rec.participant_id + ": every sample flagged as artifact");
  return out;
}

MaskedRecording normalize_coords(const MaskedRecording& rec, const ScreenGeometry& geom) {
  MaskedRecording out = rec;
  const double hx = geom.width_px / 2.0;
  const double hy = geom.height_px / 2.0;
  for (auto& s : out.rec.samples) {
    s.x_px = (s.x_px - hx) / hx;
    s.y_px = (s.y_px - hy) / hy;
  }
  return out;
}

CleanRecording downsample(const MaskedRecording& rec, std::size_t factor) {
  if (factor == 0) throw ConfigError("downsample factor must be positive");
  const auto& s = rec.rec.samples;
  const std::size_t n_out = s.size() / factor;
  CleanRecording out;
  out.participant_id = rec.rec.participant_id;
  out.sample_rate_hz = rec.rec.sample_rate_hz / static_cast<double>(factor);
  out.t_ms.resize(n_out);
  out.x.resize(n_out);
  out.y.resize(n_out);
  out.interpolated.resize(n_out);
  const double inv = 1.0 / static_cast<double>(factor);
  for (std::size_t o = 0; o < n_out; ++o) {
    double sx = 0.0, sy = 0.0;
    std::uint8_t m = 0;
    for (std::size_t k = 0; k < factor; ++k) {
      const auto& g = s[o * factor + k];
      sx += g.x_px;
      sy += g.y_px;
      m |= rec.mask.empty() ? 0 : rec.mask[o * factor + k];
    }
    out.t_ms[o] = s[o * factor].t_ms;
    out.x[o] = sx * inv;
    out.y[o] = sy * inv;
    out.interpolated[o] = m;
  }
  if (s.size() % factor != 0) {
    out.warnings.push_back("dropped " + std::to_string(s.size() % factor) + " trailing sample(s) not filling a block");
  }
  return out;
}

CleanRecording preprocess_participant(const GazeRecording& rec, const ScreenGeometry& geom) {
  auto clamped = clamp_to_screen(rec, geom);
  auto scan = detect_artifacts(clamped);
  auto filled = interpolate_artifacts(clamped, scan.spans);
  auto normalized = normalize_coords(filled, geom);
  std::size_t n_flagged = 0;
  for (auto m : normalized.mask) n_flagged += m;
  auto out = downsample(normalized, 2);
  if (scan.zero_speed_variance) out.warnings.insert(out.warnings.begin(), "zero gaze-speed variance; no velocity outliers");
  out.interpolated_fraction =
      rec.samples.empty() ? 0.0 : static_cast<double>(n_flagged) / static_cast<double>(rec.samples.size());
  if (out.interpolated_fraction > kMaxInterpolatedFraction) {
    out.flagged_for_exclusion = true;
    out.warnings.push_back("more than 50% of samples interpolated");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out.x[i]) || !std::isfinite(out.y[i])) {
      throw PreprocessError(rec.participant_id + ": non-finite value after preprocessing at sample " + std::to_string(i));
    }
  }
  return out;
}

void write_clean(const std::string& path, const CleanRecording& rec) {
  std::string out = "t_ms,x,y,interp_flag\n";
  out.reserve(rec.size() * 40 + 32);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out += format_double(rec.t_ms[i]);
    out += ',';
    out += format_double(rec.x[i]);
    out += ',';
    out += format_double(rec.y[i]);
    out += rec.interpolated[i] ? ",1\n" : ",0\n";
  }
  write_file(path, out);
}

CleanRecording read_clean(const std::string& path, const std::string& participant_id) {
  std::string text = read_file(path);
  std::string_view all(text);
  CleanRecording rec;
  rec.participant_id = participant_id;
  std::size_t start = 0, line = 0;
  while (start < all.size()) {
    std::size_t nl = all.find('\n', start);
    if (nl == std::string_view::npos) nl = all.size();
    auto row = all.substr(start, nl - start);
    start = nl + 1;
    ++line;
    if (line == 1) {
      if (trim(row) != "t_ms,x,y,interp_flag") throw ParseError(path, 1, "unexpected header");
      continue;
    }
    if (trim(row).empty()) continue;
    auto f = split_csv_line(row);
    if (f.size() != 4) throw ParseError(path, line, "expected 4 fields");
    rec.t_ms.push_back(parse_double(f[0], path, line));
    rec.x.push_back(parse_double(f[1], path, line));
    rec.y.push_back(parse_double(f[2], path, line));
    rec.interpolated.push_back(static_cast<std::uint8_t>(parse_int(f[3], path, line) != 0));
  }
  if (rec.t_ms.size() >= 2) rec.sample_rate_hz = 1000.0 / (rec.t_ms[1] - rec.t_ms[0]);
  std::size_t n_interp = 0;
  for (auto m : rec.interpolated) n_interp += m;
  rec.interpolated_fraction = rec.size() ? static_cast<double>(n_interp) / static_cast<double>(rec.size()) : 0.0;
  return rec;
}

}  // namespace gazenet
