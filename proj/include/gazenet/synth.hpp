#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "gazenet/corpus.hpp"

namespace gazenet {

enum class Direction { X, Y };
enum class EffectCondition { Negative, PositiveNeutral, Both };

std::string_view to_string(Direction d);
std::string_view to_string(EffectCondition c);
Direction parse_direction(std::string_view s);
EffectCondition parse_effect_condition(std::string_view s);

// Planted group effect. Window times are relative to the button press.
struct EffectSpec {
  Direction channel = Direction::X;
  EffectCondition condition = EffectCondition::Negative;
  double window_start_ms = -200.0;
  double window_end_ms = 0.0;
  std::array<double, 3> amplitude{0.0, 0.15, 0.25};  // by Group, normalized units
  double s_window_shift_ms = -300.0;                 // group S window opens earlier
  // P(agree) indexed [group][sentiment]
  std::array<std::array<double, 2>, 3> endorsement{{{0.15, 0.6}, {0.55, 0.6}, {0.70, 0.6}}};

  // Probability that the eyes visit the chosen button shortly before the press.
  double aoi_coupling = 0.05;
  // Between-subject spread of the drift amplitude (additive, normalized units)
  // and of the typical response latency (log scale).
  double amplitude_sd = 0.08;
  double latency_subject_sd = 0.25;
  // Trial-to-trial spread of the drift amplitude around the subject's value.
  double amplitude_trial_sd = 0.0;

  double amplitude_of(Group g) const { return amplitude[static_cast<std::size_t>(g)]; }
  double agree_prob(Group g, Sentiment s) const {
    return endorsement[static_cast<std::size_t>(g)][static_cast<std::size_t>(s)];
  }
  // Throws ConfigError on probabilities outside [0,1], non-finite amplitudes
  // or an empty window.
  void validate() const;

  // All amplitudes zero, equal endorsement, no between-subject amplitude spread.
  static EffectSpec null_spec();
};

struct SynthConfig {
  std::size_t n_per_group = 10;
  std::size_t n_sentences = 40;  // even: sentences come in valence pairs
  double sample_rate_hz = 500.0;

  // Fixational jitter: Ornstein-Uhlenbeck around the current target.
  double ou_theta = 10.0;  // 1/s
  double ou_sigma = 0.05;  // normalized units per sqrt(s)
  double microsaccade_sd = 0.01;

  std::size_t min_words = 5;
  std::size_t max_words = 11;
  double fixation_cross_ms = 500.0;
  double word_ms = 300.0;
  double inter_word_ms = 300.0;
  double inter_trial_ms = 800.0;

  // Response latency after final-word onset: lognormal, clipped.
  double latency_median_ms = 800.0;
  double latency_sigma = 0.4;
  double latency_min_ms = 200.0;
  double latency_max_ms = 2300.0;

  double miss_rate = 0.02;
  double blink_rate_hz = 0.1;
  double blink_min_ms = 100.0;
  double blink_max_ms = 200.0;

  bool questionnaire_scores = true;

  void validate() const;
};

// Builds the cohort in memory. Same (config, spec, seed) gives identical data.
Cohort synthesize_cohort(const SynthConfig& cfg, const EffectSpec& spec, std::uint64_t seed);

// Writes the corpus files under `corpus_dir` plus provenance.json; returns
// the in-memory cohort that was written.
Cohort generate_cohort(const std::string& corpus_dir, const SynthConfig& cfg, const EffectSpec& spec,
                       std::uint64_t seed);

// Every generator parameter, so a cohort can be regenerated from the record.
std::string describe_cohort(std::uint64_t seed, const SynthConfig& cfg, const EffectSpec& spec);
// Inverse of describe_cohort.
void parse_description(const std::string& json, std::uint64_t& seed, SynthConfig& cfg, EffectSpec& spec);

}  // namespace gazenet
