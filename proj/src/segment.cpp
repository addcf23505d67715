#include "gazenet/segment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace gazenet {

std::string_view to_string(Alignment a) { return a == Alignment::Reading ? "reading" : "response"; }

Alignment parse_alignment(std::string_view s) {
  s = trim(s);
  if (s == "reading") return Alignment::Reading;
  if (s == "response") return Alignment::Response;
  throw ConfigError("unknown alignment '" + std::string(s) + "'");
}

std::size_t segment_length(Alignment a) { return a == Alignment::Reading ? kReadingLength : kResponseLength; }

long long time_to_index(double t_ms, double t0_ms, double rate_hz) {
  return std::llround((t_ms - t0_ms) * rate_hz / 1000.0);
}

namespace {

TrialSegment cut(const CleanRecording& rec, const TrialRecord& trial, Alignment alignment, double window_start_ms) {
  if (rec.size() == 0) throw SegmentError(trial.trial_id + ": empty recording");
  const std::size_t len = segment_length(alignment);
  const long long start = time_to_index(window_start_ms, rec.t_ms.front(), rec.sample_rate_hz);
  if (start < 0 || static_cast<std::size_t>(start) + len > rec.size()) {
    throw SegmentError(trial.trial_id + ": window exceeds recording bounds");
  }
  TrialSegment seg;
  seg.trial_id = trial.trial_id;
  seg.sentiment = trial.sentiment;
  seg.alignment = alignment;
  seg.length = len;
  seg.start_ms = rec.t_ms[static_cast<std::size_t>(start)];
  seg.data.resize(2 * len);
  for (std::size_t i = 0; i < len; ++i) {
    seg.data[i] = static_cast<float>(rec.x[static_cast<std::size_t>(start) + i]);
    seg.data[len + i] = static_cast<float>(rec.y[static_cast<std::size_t>(start) + i]);
  }
  return seg;
}

}  // namespace

TrialSegment segment_reading(const CleanRecording& rec, const TrialRecord& trial) {
  return cut(rec, trial, Alignment::Reading, trial.final_word_onset_ms - kReadingPreMs);
}

TrialSegment segment_response(const CleanRecording& rec, const TrialRecord& trial) {
  if (trial.response == Response::Missed || !trial.response_time_ms) {
    throw SegmentError(trial.trial_id + ": no response");
  }
  return cut(rec, trial, Alignment::Response, *trial.response_time_ms - kResponsePreMs);
}

TrialSegment segment_trial(const CleanRecording& rec, const TrialRecord& trial, Alignment alignment) {
  return alignment == Alignment::Reading ? segment_reading(rec, trial) : segment_response(rec, trial);
}

const ParticipantSegments* SegmentStore::find(std::string_view id) const {
  for (const auto& p : participants) {
    if (p.participant_id == id) return &p;
  }
  return nullptr;
}

SegmentStore segment_cohort(const Cohort& cohort, const std::vector<CleanRecording>& cleans, Alignment alignment,
                            double trial_fraction) {
  if (!(trial_fraction > 0.0 && trial_fraction <= 1.0)) throw ConfigError("trial_fraction must lie in (0, 1]");
  std::map<std::string_view, const CleanRecording*> by_id;
  for (const auto& c : cleans) by_id[c.participant_id] = &c;

  SegmentStore store;
  store.alignment = alignment;
  store.length = segment_length(alignment);
  for (const auto& p : cohort.participants) {
    auto it = by_id.find(p.info.id);
    if (it == by_id.end()) throw DependencyError("no preprocessed recording for participant " + p.info.id);
    const CleanRecording& rec = *it->second;

    std::vector<const TrialRecord*> retained;
    for (const auto& t : p.trials) {
      if (!t.excluded) retained.push_back(&t);
    }
    std::stable_sort(retained.begin(), retained.end(), [](const TrialRecord* a, const TrialRecord* b) {
      return a->final_word_onset_ms < b->final_word_onset_ms;
    });
    const auto keep = static_cast<std::size_t>(
        std::ceil(trial_fraction * static_cast<double>(retained.size()) - 1e-9));
    retained.resize(std::min(keep, retained.size()));

    ParticipantSegments ps;
    ps.participant_id = p.info.id;
    ps.group = p.info.group;
    ps.gender = p.info.gender;
    for (const auto* t : retained) {
      try {
        auto seg = segment_trial(rec, *t, alignment);
        ps.of(t->sentiment).push_back(std::move(seg));
      } catch (const SegmentError& e) {
        ps.dropped.push_back({t->trial_id, e.what()});
      }
    }
    for (auto s : kSentiments) {
      if (ps.of(s).size() < kMinTrialsPerSentiment) {
        store.warnings.push_back(p.info.id + ": only " + std::to_string(ps.of(s).size()) + " " +
                                 std::string(to_string(s)) + " segments");
      }
    }
    store.participants.push_back(std::move(ps));
  }
  return store;
}

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw IngestError(path + ": truncated segment file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_segments(const std::string& path, const ParticipantSegments& segs, Alignment alignment, std::size_t length) {
  std::string out = "GZSG";
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, alignment == Alignment::Reading ? 0u : 1u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(length));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(segs.size()));
  for (auto s : kSentiments) {
    for (const auto& seg : segs.of(s)) {
      if (seg.length != length) throw Error("segment length mismatch while writing " + path);
      put<std::uint8_t>(out, s == Sentiment::Negative ? 0 : 1);
      put<std::uint16_t>(out, static_cast<std::uint16_t>(seg.trial_id.size()));
      out += seg.trial_id;
      put<double>(out, seg.start_ms);
      out.append(reinterpret_cast<const char*>(seg.data.data()), seg.data.size() * sizeof(float));
    }
  }
  write_file(path, out);
}

ParticipantSegments read_segments(const std::string& path, std::string participant_id, Group group, Gender gender) {
  const std::string in = read_file(path);
  if (in.size() < 4 || in.compare(0, 4, "GZSG") != 0) throw IngestError(path + ": not a segment file");
  std::size_t pos = 4;
  if (get<std::uint32_t>(in, pos, path) != 1) throw IngestError(path + ": unsupported segment file version");
  const Alignment alignment = get<std::uint32_t>(in, pos, path) == 0 ? Alignment::Reading : Alignment::Response;
  const auto length = get<std::uint32_t>(in, pos, path);
  const auto n = get<std::uint32_t>(in, pos, path);
  ParticipantSegments ps;
  ps.participant_id = std::move(participant_id);
  ps.group = group;
  ps.gender = gender;
  for (std::uint32_t i = 0; i < n; ++i) {
    TrialSegment seg;
    seg.sentiment = get<std::uint8_t>(in, pos, path) == 0 ? Sentiment::Negative : Sentiment::PositiveNeutral;
    const auto id_len = get<std::uint16_t>(in, pos, path);
    if (pos + id_len > in.size()) throw IngestError(path + ": truncated segment file");
    seg.trial_id = in.substr(pos, id_len);
    pos += id_len;
    seg.start_ms = get<double>(in, pos, path);
    seg.alignment = alignment;
    seg.length = length;
    seg.data.resize(2 * static_cast<std::size_t>(length));
    const std::size_t bytes = seg.data.size() * sizeof(float);
    if (pos + bytes > in.size()) throw IngestError(path + ": truncated segment file");
    std::memcpy(seg.data.data(), in.data() + pos, bytes);
    pos += bytes;
    ps.of(seg.sentiment).push_back(std::move(seg));
  }
  return ps;
}

}  // namespace gazenet
