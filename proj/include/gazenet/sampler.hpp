#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazenet/segment.hpp"
#include "gazenet/task.hpp"

namespace gazenet {

inline constexpr std::size_t kDefaultSetSize = 30;
inline constexpr std::size_t kDefaultSetCount = 200;

// One bootstrapped set: indices into the participant's segments of one
// sentiment (duplicates allowed).
struct TrialSet {
  Sentiment sentiment = Sentiment::Negative;
  std::vector<std::uint32_t> source;
};

struct ParticipantSets {
  std::string participant_id;
  std::vector<TrialSet> negative;
  std::vector<TrialSet> positive;

  const std::vector<TrialSet>& of(Sentiment s) const { return s == Sentiment::Negative ? negative : positive; }
};

struct SetStore {
  std::size_t set_size = kDefaultSetSize;
  std::size_t n_sets = kDefaultSetCount;
  std::vector<ParticipantSets> participants;  // parallel to SegmentStore::participants
  std::vector<std::string> skipped;           // "id: reason"

  const ParticipantSets* find(std::string_view id) const;
};

// Draws n_sets sets of set_size trials uniformly with replacement, per
// sentiment. The draw order is the in-set trial order. Fully determined by
// (seed, participant id, sentiment). Throws SegmentError when a sentiment has
// no segments.
ParticipantSets make_sets(const ParticipantSegments& segs, std::size_t set_size, std::size_t n_sets,
                          std::uint64_t seed);
// Participants lacking segments in a sentiment get an empty entry and a
// reason in SetStore::skipped.
SetStore make_sets(const SegmentStore& store, std::size_t set_size, std::size_t n_sets, std::uint64_t seed);

enum class AblationMode { None, NegativeOnly, PositiveOnly, XOnly, YOnly, ShuffledSentiment };

std::string_view to_string(AblationMode m);
AblationMode parse_ablation(std::string_view s);

// One model input: the i-th negative set paired with the i-th positive set.
struct InputSample {
  std::size_t participant = 0;  // index into SegmentStore/SetStore participants
  std::size_t set_index = 0;
  int label = -1;  // 0/1, or -1 for participants outside the task (zero-shot)
  AblationMode ablation = AblationMode::None;
};

std::vector<InputSample> pair_sets(const ParticipantSets& sets, std::size_t participant_index, std::optional<int> label);

// Zero-filling ablations (branch or direction). ShuffledSentiment acts on
// segments before set construction; see shuffle_sentiment.
std::vector<InputSample> ablate_sets(std::vector<InputSample> samples, AblationMode mode);

// Pools a participant's trials across sentiments and redeals them at random,
// keeping the per-sentiment counts.
ParticipantSegments shuffle_sentiment(const ParticipantSegments& segs, std::uint64_t seed);
SegmentStore shuffle_sentiment(const SegmentStore& store, std::uint64_t seed);

// Fills `neg` and `pos` (each 2 x set_size x T, channel-major: all x rows then
// all y rows) for one sample, applying its ablation.
void materialize(const ParticipantSegments& segs, const ParticipantSets& sets, const InputSample& sample,
                 std::span<float> neg, std::span<float> pos);

// Manifest CSV: participant_id,sentiment,set_index,position,trial_id
void write_set_manifest(const std::string& path, const SegmentStore& segs, const SetStore& sets);
SetStore read_set_manifest(const std::string& path, const SegmentStore& segs);
// Materialized sets of one participant in the segment-file layout: every
// member trial of every set, negative sets first, set by set.
void write_materialized_sets(const std::string& path, const ParticipantSegments& segs, const ParticipantSets& sets,
                             std::size_t length);

}  // namespace gazenet
