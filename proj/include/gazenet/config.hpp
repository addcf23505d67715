#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gazenet/harness.hpp"
#include "gazenet/sampler.hpp"
#include "gazenet/segment.hpp"
#include "gazenet/synth.hpp"
#include "gazenet/task.hpp"

namespace gazenet {

// Pipeline stages, in dependency order. Each artifact records the hash of the
// configuration fields its stage (and every upstream stage) reads.
enum class Stage { Synth, Preprocess, Segment, Sets, Train, Eval, Attribute };

std::string_view to_string(Stage s);

// Whole-run configuration, read from a key = value file with [sections].
// Defaults follow the published protocol; the synth section only matters for
// synthetic corpora.
struct RunConfig {
  // [paths]
  std::string corpus_dir = "corpus";
  std::string work_dir = "work";

  // [data]
  Alignment alignment = Alignment::Response;
  TaskName task = TaskName::CvDS;
  std::size_t set_size = kDefaultSetSize;
  std::size_t n_sets = kDefaultSetCount;
  double trial_fraction = 1.0;
  AblationMode ablation = AblationMode::None;

  // [model]
  std::size_t filters = 8;
  std::size_t hidden = 64;
  bool share_directions = true;

  // [train]
  std::size_t batch_size = 64;
  double lr = 5e-4;
  std::size_t patience = 5;
  std::size_t max_epochs = 50;
  std::size_t n_outer = 5;
  std::size_t n_inner = 10;
  double val_fraction = 0.2;

  // [stats]
  std::size_t bootstrap_iters = 1000;
  bool permutation = true;  // train the label-permuted null replicate for p_perm

  // [attribute]
  std::size_t ig_steps = 50;
  std::size_t ig_samples = 10;  // sets per participant, 0 = all
  double density_window_ms = 100.0;
  double density_zoom = 1.0;

  // [seed]
  std::uint64_t seed = 1;

  // [synth]
  SynthConfig synth;
  EffectSpec effect;

  // [sweep]
  std::vector<std::size_t> sweep_set_sizes{1, 10, 30, 50, 100};
  std::vector<std::size_t> sweep_n_sets{1, 10, 50, 100, 200};
  std::vector<double> sweep_trial_fractions{0.25, 0.5, 0.75, 1.0};

  // Throws ConfigError naming the offending field.
  void validate() const;

  nnet::ModelConfig model_config() const;
  TrainConfig train_config() const;
  ProtocolConfig protocol_config(std::size_t workers = 1) const;

  // Canonical text form: every field, fixed order, shortest round-trip numbers.
  std::string to_ini() const;
  // Hash of the fields read by `stage` and everything upstream of it.
  std::string stage_hash(Stage stage) const;
  std::string hash() const { return stage_hash(Stage::Attribute); }

  // Unknown sections or keys and malformed values are ConfigErrors.
  static RunConfig parse(const std::string& text, const std::string& source = "config");
  static RunConfig load(const std::string& path);
};

}  // namespace gazenet
