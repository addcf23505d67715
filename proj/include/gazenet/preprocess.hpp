#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gazenet/corpus.hpp"

namespace gazenet {

// Gaze in normalized screen coordinates at the decimated rate.
struct CleanRecording {
  std::string participant_id;
  double sample_rate_hz = 250.0;
  std::vector<double> t_ms;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::uint8_t> interpolated;  // 1 where the sample came from interpolation
  double interpolated_fraction = 0.0;      // measured on the full-rate signal
  bool flagged_for_exclusion = false;      // more than half the signal was interpolated
  std::vector<std::string> warnings;

  std::size_t size() const { return t_ms.size(); }
};

// Half-open range of sample indices [begin, end).
struct SampleSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const SampleSpan&) const = default;
};

struct ArtifactScan {
  std::vector<SampleSpan> spans;  // sorted, merged when adjacent or overlapping
  double speed_mean = 0.0;        // px/ms over transitions not touching annotated artifacts
  double speed_sd = 0.0;
  bool zero_speed_variance = false;
};

// A recording being conditioned, carrying the interpolation mask along.
struct MaskedRecording {
  GazeRecording rec;
  std::vector<std::uint8_t> mask;
};

inline constexpr double kOutlierSigmas = 3.0;
inline constexpr double kMaxInterpolatedFraction = 0.5;

GazeRecording clamp_to_screen(const GazeRecording& rec, const ScreenGeometry& geom = {});

// Flags annotated blinks, samples marked invalid, and samples whose incoming
// 2D speed exceeds mean + 3 SD of the recording's speed distribution.
ArtifactScan detect_artifacts(const GazeRecording& rec);

std::vector<SampleSpan> merge_spans(std::vector<SampleSpan> spans);

// Linear interpolation in time between the nearest unflagged neighbours, per
// axis; leading/trailing runs hold the nearest valid value. Throws
// PreprocessError when every sample is flagged.
MaskedRecording interpolate_artifacts(const GazeRecording& rec, const std::vector<SampleSpan>& spans);

// Pixel -> [-1,1] with the screen center at (0,0).
MaskedRecording normalize_coords(const MaskedRecording& rec, const ScreenGeometry& geom = {});

// Mean of each block of `factor` consecutive samples; a trailing partial
// block is dropped with a warning.
CleanRecording downsample(const MaskedRecording& rec, std::size_t factor = 2);

// clamp -> detect -> interpolate -> normalize -> downsample.
CleanRecording preprocess_participant(const GazeRecording& rec, const ScreenGeometry& geom = {});

// Optional cache format: t_ms,x,y,interp_flag
void write_clean(const std::string& path, const CleanRecording& rec);
CleanRecording read_clean(const std::string& path, const std::string& participant_id);

}  // namespace gazenet
