#include "gazenet/sampler.hpp"

#include <algorithm>
#include <cstring>
#include <map>

namespace gazenet {

const ParticipantSets* SetStore::find(std::string_view id) const {
  for (const auto& p : participants) {
    if (p.participant_id == id) return &p;
  }
  return nullptr;
}

ParticipantSets make_sets(const ParticipantSegments& segs, std::size_t set_size, std::size_t n_sets,
                          std::uint64_t seed) {
  if (set_size == 0 || n_sets == 0) throw ConfigError("set_size and n_sets must be positive");
  ParticipantSets out;
  out.participant_id = segs.participant_id;
  for (auto s : kSentiments) {
    const auto available = segs.of(s).size();
    if (available == 0) {
      throw SegmentError(segs.participant_id + ": no " + std::string(to_string(s)) + " segments");
    }
    Rng rng(derive_seed(seed, {"sets", segs.participant_id, to_string(s)}));
    auto& dst = s == Sentiment::Negative ? out.negative : out.positive;
    dst.resize(n_sets);
    for (auto& set : dst) {
      set.sentiment = s;
      set.source.resize(set_size);
      for (auto& idx : set.source) idx = static_cast<std::uint32_t>(rng.index(available));
    }
  }
  return out;
}

SetStore make_sets(const SegmentStore& store, std::size_t set_size, std::size_t n_sets, std::uint64_t seed) {
  SetStore out;
  out.set_size = set_size;
  out.n_sets = n_sets;
  for (const auto& p : store.participants) {
    try {
      out.participants.push_back(make_sets(p, set_size, n_sets, seed));
    } catch (const SegmentError& e) {
      ParticipantSets empty;
      empty.participant_id = p.participant_id;
      out.participants.push_back(std::move(empty));
      out.skipped.push_back(e.what());
    }
  }
  return out;
}

std::string_view to_string(AblationMode m) {
  switch (m) {
    case AblationMode::None:
      return "none";
    case AblationMode::NegativeOnly:
      return "negative_only";
    case AblationMode::PositiveOnly:
      return "positive_only";
    case AblationMode::XOnly:
      return "x_only";
    case AblationMode::YOnly:
      return "y_only";
    case AblationMode::ShuffledSentiment:
      return "shuffled_sentiment";
  }
  return "?";
}

AblationMode parse_ablation(std::string_view s) {
  s = trim(s);
  for (auto m : {AblationMode::None, AblationMode::NegativeOnly, AblationMode::PositiveOnly, AblationMode::XOnly,
                 AblationMode::YOnly, AblationMode::ShuffledSentiment}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown ablation mode '" + std::string(s) + "'");
}

std::vector<InputSample> pair_sets(const ParticipantSets& sets, std::size_t participant_index, std::optional<int> label) {
  if (sets.negative.size() != sets.positive.size()) {
    throw ConfigError(sets.participant_id + ": negative/positive set counts differ (" +
                      std::to_string(sets.negative.size()) + " vs " + std::to_string(sets.positive.size()) + ")");
  }
  std::vector<InputSample> out(sets.negative.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].participant = participant_index;
    out[i].set_index = i;
    out[i].label = label.value_or(-1);
  }
  return out;
}

std::vector<InputSample> ablate_sets(std::vector<InputSample> samples, AblationMode mode) {
  if (mode == AblationMode::ShuffledSentiment) {
    throw ConfigError("shuffled_sentiment is applied to segments before set construction");
  }
  for (auto& s : samples) s.ablation = mode;
  return samples;
}

ParticipantSegments shuffle_sentiment(const ParticipantSegments& segs, std::uint64_t seed) {
  std::vector<const TrialSegment*> pool;
  for (auto s : kSentiments) {
    for (const auto& seg : segs.of(s)) pool.push_back(&seg);
  }
  Rng rng(derive_seed(seed, {"shuffle_sentiment", segs.participant_id}));
  rng.shuffle(pool);
  ParticipantSegments out;
  out.participant_id = segs.participant_id;
  out.group = segs.group;
  out.gender = segs.gender;
  out.dropped = segs.dropped;
  std::size_t k = 0;
  for (auto s : kSentiments) {
    for (std::size_t i = 0; i < segs.of(s).size(); ++i) {
      TrialSegment seg = *pool[k++];
      seg.sentiment = s;
      out.of(s).push_back(std::move(seg));
    }
  }
  return out;
}

SegmentStore shuffle_sentiment(const SegmentStore& store, std::uint64_t seed) {
  SegmentStore out;
  out.alignment = store.alignment;
  out.length = store.length;
  out.warnings = store.warnings;
  for (const auto& p : store.participants) out.participants.push_back(shuffle_sentiment(p, seed));
  return out;
}

namespace {

void fill_set(const std::vector<TrialSegment>& segs, const TrialSet& set, std::span<float> dst, bool keep_x,
              bool keep_y) {
  const std::size_t rows = set.source.size();
  const std::size_t len = segs.empty() ? 0 : segs.front().length;
  if (dst.size() != 2 * rows * len) throw ModelFault("materialize: destination size mismatch");
  float* x_dst = dst.data();
  float* y_dst = dst.data() + rows * len;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& seg = segs[set.source[r]];
    if (keep_x) {
      std::memcpy(x_dst + r * len, seg.x(), len * sizeof(float));
    } else {
      std::fill_n(x_dst + r * len, len, 0.0f);
    }
    if (keep_y) {
      std::memcpy(y_dst + r * len, seg.y(), len * sizeof(float));
    } else {
      std::fill_n(y_dst + r * len, len, 0.0f);
    }
  }
}

}  // namespace

void materialize(const ParticipantSegments& segs, const ParticipantSets& sets, const InputSample& sample,
                 std::span<float> neg, std::span<float> pos) {
  const bool keep_x = sample.ablation != AblationMode::YOnly;
  const bool keep_y = sample.ablation != AblationMode::XOnly;
  if (sample.ablation == AblationMode::PositiveOnly) {
    std::fill(neg.begin(), neg.end(), 0.0f);
  } else {
    fill_set(segs.negative, sets.negative.at(sample.set_index), neg, keep_x, keep_y);
  }
  if (sample.ablation == AblationMode::NegativeOnly) {
    std::fill(pos.begin(), pos.end(), 0.0f);
  } else {
    fill_set(segs.positive, sets.positive.at(sample.set_index), pos, keep_x, keep_y);
  }
}

void write_set_manifest(const std::string& path, const SegmentStore& segs, const SetStore& sets) {
  std::string out = "participant_id,sentiment,set_index,position,trial_id\n";
  for (std::size_t p = 0; p < sets.participants.size(); ++p) {
    const auto& ps = sets.participants[p];
    const auto* sp = segs.find(ps.participant_id);
    if (!sp) throw DependencyError("segments missing for " + ps.participant_id);
    for (auto s : kSentiments) {
      const auto& list = ps.of(s);
      for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t k = 0; k < list[i].source.size(); ++k) {
          out += ps.participant_id + "," + std::string(to_string(s)) + "," + std::to_string(i) + "," +
                 std::to_string(k) + "," + sp->of(s)[list[i].source[k]].trial_id + "\n";
        }
      }
    }
  }
  write_file(path, out);
}

SetStore read_set_manifest(const std::string& path, const SegmentStore& segs) {
  const std::string text = read_file(path);
  std::string_view all(text);
  SetStore out;
  std::map<std::string, std::size_t> slot;
  std::vector<std::map<std::pair<int, std::string>, std::uint32_t>> index_of;
  for (const auto& p : segs.participants) {
    slot[p.participant_id] = out.participants.size();
    ParticipantSets ps;
    ps.participant_id = p.participant_id;
    out.participants.push_back(std::move(ps));
    std::map<std::pair<int, std::string>, std::uint32_t> m;
    for (auto s : kSentiments) {
      for (std::size_t i = 0; i < p.of(s).size(); ++i) {
        m[{static_cast<int>(s), p.of(s)[i].trial_id}] = static_cast<std::uint32_t>(i);
      }
    }
    index_of.push_back(std::move(m));
  }
  std::size_t start = 0, line = 0;
  while (start < all.size()) {
    std::size_t nl = all.find('\n', start);
    if (nl == std::string_view::npos) nl = all.size();
    auto row = all.substr(start, nl - start);
    start = nl + 1;
    if (++line == 1 || trim(row).empty()) continue;
    auto f = split_csv_line(row);
    if (f.size() != 5) throw ParseError(path, line, "expected 5 fields");
    auto it = slot.find(std::string(trim(f[0])));
    if (it == slot.end()) throw ParseError(path, line, "unknown participant " + std::string(f[0]));
    const Sentiment s = parse_sentiment(f[1]);
    const auto set_index = static_cast<std::size_t>(parse_int(f[2], path, line));
    const auto position = static_cast<std::size_t>(parse_int(f[3], path, line));
    auto& ps = out.participants[it->second];
    auto& list = s == Sentiment::Negative ? ps.negative : ps.positive;
    if (list.size() <= set_index) list.resize(set_index + 1);
    auto& set = list[set_index];
    set.sentiment = s;
    if (set.source.size() <= position) set.source.resize(position + 1);
    auto found = index_of[it->second].find({static_cast<int>(s), std::string(trim(f[4]))});
    if (found == index_of[it->second].end()) throw ParseError(path, line, "unknown trial " + std::string(f[4]));
    set.source[position] = found->second;
  }
  for (const auto& ps : out.participants) {
    if (!ps.negative.empty()) {
      out.n_sets = ps.negative.size();
      out.set_size = ps.negative.front().source.size();
      break;
    }
  }
  return out;
}

void write_materialized_sets(const std::string& path, const ParticipantSegments& segs, const ParticipantSets& sets,
                             std::size_t length) {
  ParticipantSegments flat;
  flat.participant_id = segs.participant_id;
  for (auto s : kSentiments) {
    for (const auto& set : sets.of(s)) {
      for (auto idx : set.source) flat.of(s).push_back(segs.of(s)[idx]);
    }
  }
  write_segments(path, flat, segs.negative.empty() ? Alignment::Response : segs.negative.front().alignment, length);
}

}  // namespace gazenet
