#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gazenet/corpus.hpp"
#include "gazenet/preprocess.hpp"

namespace gazenet {

enum class Alignment { Reading, Response };

std::string_view to_string(Alignment a);
Alignment parse_alignment(std::string_view s);

// Window geometry at 250 Hz (4 ms per sample).
inline constexpr double kSegmentRateHz = 250.0;
inline constexpr double kReadingPreMs = 500.0;
inline constexpr double kReadingPostMs = 900.0;
inline constexpr double kResponsePreMs = 1200.0;
inline constexpr std::size_t kReadingLength = 350;
inline constexpr std::size_t kResponseLength = 300;

std::size_t segment_length(Alignment a);

// Two rows of `length` samples: row 0 = x, row 1 = y.
struct TrialSegment {
  std::string trial_id;
  Sentiment sentiment = Sentiment::Negative;
  Alignment alignment = Alignment::Response;
  std::size_t length = 0;
  double start_ms = 0.0;  // timestamp of the first sample
  std::vector<float> data;

  const float* x() const { return data.data(); }
  const float* y() const { return data.data() + length; }
};

// Index of timestamp t in a recording starting at t0: round((t - t0) * rate / 1000).
long long time_to_index(double t_ms, double t0_ms, double rate_hz = kSegmentRateHz);

// [onset - 500 ms, onset + 900 ms); the onset sample sits at index 125.
// Throws SegmentError when the window leaves the recording.
TrialSegment segment_reading(const CleanRecording& rec, const TrialRecord& trial);
// [response - 1200 ms, response); throws SegmentError for missed trials or underflow.
TrialSegment segment_response(const CleanRecording& rec, const TrialRecord& trial);
TrialSegment segment_trial(const CleanRecording& rec, const TrialRecord& trial, Alignment alignment);

struct DroppedTrial {
  std::string trial_id;
  std::string reason;
};

struct ParticipantSegments {
  std::string participant_id;
  Group group = Group::C;
  Gender gender = Gender::F;
  std::vector<TrialSegment> negative;
  std::vector<TrialSegment> positive;
  std::vector<DroppedTrial> dropped;

  const std::vector<TrialSegment>& of(Sentiment s) const {
    return s == Sentiment::Negative ? negative : positive;
  }
  std::vector<TrialSegment>& of(Sentiment s) { return s == Sentiment::Negative ? negative : positive; }
  std::size_t size() const { return negative.size() + positive.size(); }
};

struct SegmentStore {
  Alignment alignment = Alignment::Response;
  std::size_t length = kResponseLength;
  std::vector<ParticipantSegments> participants;
  std::vector<std::string> warnings;

  const ParticipantSegments* find(std::string_view id) const;
};

inline constexpr std::size_t kMinTrialsPerSentiment = 30;

// Segments the chronologically first ceil(fraction * N) retained trials of
// each participant. `cleans` is matched to cohort participants by id.
SegmentStore segment_cohort(const Cohort& cohort, const std::vector<CleanRecording>& cleans, Alignment alignment,
                            double trial_fraction = 1.0);

// Binary layout (little-endian):
//   magic "GZSG" | u32 version=1 | u32 alignment (0 reading, 1 response)
//   u32 length T | u32 n_trials
//   per trial: u8 sentiment (0 negative, 1 positive) | u16 id_len | id bytes
//              | f64 start_ms | f32[T] x row | f32[T] y row
void write_segments(const std::string& path, const ParticipantSegments& segs, Alignment alignment, std::size_t length);
ParticipantSegments read_segments(const std::string& path, std::string participant_id, Group group, Gender gender);

}  // namespace gazenet
