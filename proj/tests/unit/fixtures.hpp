#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gazenet/common.hpp"
#include "gazenet/corpus.hpp"
#include "gazenet/preprocess.hpp"

namespace fixtures {

// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("gazenet_test_" + tag + "_" + std::to_string(gazenet::fnv1a(tag) ^ reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Constant gaze at (x, y) px, n samples at `rate` Hz starting at t0.
inline gazenet::GazeRecording constant_recording(std::size_t n, double x = 960.0, double y = 540.0,
                                                 double rate = 500.0, double t0 = 0.0) {
  gazenet::GazeRecording rec;
  rec.participant_id = "P";
  rec.sample_rate_hz = rate;
  for (std::size_t i = 0; i < n; ++i) rec.samples.push_back({t0 + 1000.0 * static_cast<double>(i) / rate, x, y, true});
  return rec;
}

// Clean 250 Hz recording from t0 with x(t) = slope_x * t_ms, y constant.
inline gazenet::CleanRecording ramp_clean(std::size_t n, double slope_x = 1e-4, double y = 0.25, double t0 = 0.0) {
  gazenet::CleanRecording rec;
  rec.participant_id = "P";
  rec.sample_rate_hz = 250.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + 4.0 * static_cast<double>(i);
    rec.t_ms.push_back(t);
    rec.x.push_back(slope_x * t);
    rec.y.push_back(y);
    rec.interpolated.push_back(0);
  }
  return rec;
}

// One participant with `n_sentences` sentences shown twice, 3 s per trial,
// gaze covering every trial. The first `n_missed` trials have no response.
inline gazenet::ParticipantData participant(const std::string& id, gazenet::Group group, std::size_t n_sentences,
                                            std::size_t n_missed = 0) {
  using namespace gazenet;
  ParticipantData p;
  p.info.id = id;
  p.info.group = group;
  p.info.gender = Gender::F;
  const std::size_t n_trials = 2 * n_sentences;
  const double trial_ms = 3000.0;
  for (std::size_t i = 0; i < n_trials; ++i) {
    TrialRecord t;
    t.trial_id = id + "_t" + std::to_string(i);
    t.sentence_id = "s" + std::to_string(i % n_sentences);
    t.presentation = i < n_sentences ? Presentation::First : Presentation::Second;
    t.sentiment = (i % n_sentences) % 2 == 0 ? Sentiment::Negative : Sentiment::PositiveNeutral;
    t.final_word_onset_ms = 1000.0 + trial_ms * static_cast<double>(i);
    if (i < n_missed) {
      t.response = Response::Missed;
    } else {
      t.response = i % 3 == 0 ? Response::Agree : Response::Disagree;
      t.response_time_ms = t.final_word_onset_ms + 1200.0;
    }
    p.trials.push_back(t);
  }
  const std::size_t n_samples = static_cast<std::size_t>((1000.0 + trial_ms * static_cast<double>(n_trials)) / 2.0);
  p.gaze = constant_recording(n_samples);
  p.gaze.participant_id = id;
  for (std::size_t i = 0; i < p.gaze.samples.size(); ++i) {
    p.gaze.samples[i].x_px = 960.0 + 10.0 * std::sin(0.01 * static_cast<double>(i));
  }
  return p;
}

}  // namespace fixtures
