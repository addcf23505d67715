#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gazenet/nnet.hpp"
#include "gazenet/sampler.hpp"
#include "gazenet/segment.hpp"
#include "gazenet/task.hpp"

namespace gazenet {

// Participants as the planner sees them; indices into this roster are used
// throughout the harness.
std::vector<Participant> roster_of(const SegmentStore& store);
std::vector<Participant> roster_of(const Cohort& cohort);

struct InnerSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

struct FoldPlan {
  TaskSpec task;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> outer;  // test participants per fold (in-task only)
  std::vector<std::size_t> zero_shot;           // participants of excluded groups
  std::vector<std::vector<InnerSplit>> inner;   // [fold][seed]

  std::size_t n_outer() const { return outer.size(); }
  std::size_t n_inner() const { return inner.empty() ? 0 : inner.front().size(); }
  // Outer-train participants of a fold (every in-task participant outside it).
  std::vector<std::size_t> outer_train(std::size_t fold) const;
  // Fold holding the participant, or nullopt for zero-shot participants.
  std::optional<std::size_t> fold_of(std::size_t participant) const;
};

// Stratified by group x gender: each stratum is shuffled and dealt round-robin
// with one pointer shared across strata, so strata differ by at most one
// between folds and fold sizes differ by at most one. Inner splits hold out
// every fifth participant of the shuffled, stratified outer-train list.
// Throws ConfigError when fewer in-task participants than folds.
FoldPlan plan_folds(const std::vector<Participant>& roster, const TaskSpec& task, std::uint64_t seed,
                    std::size_t n_outer = 5, std::size_t n_inner = 10, double val_fraction = 0.2);

// Materializes model inputs on demand from segments and set indices.
class SampleSource {
 public:
  SampleSource(const SegmentStore& segments, const SetStore& sets, AblationMode ablation = AblationMode::None);

  std::size_t participants() const { return segments_->participants.size(); }
  std::size_t length() const { return segments_->length; }
  std::size_t set_size() const { return sets_->set_size; }
  std::size_t sets_of(std::size_t participant) const;
  std::size_t input_size() const { return 2 * set_size() * length(); }
  AblationMode ablation() const { return ablation_; }
  // Writes the paired negative/positive sets (2 x set_size x T each).
  void fill(std::size_t participant, std::size_t set_index, float* neg, float* pos) const;

 private:
  const SegmentStore* segments_;
  const SetStore* sets_;
  AblationMode ablation_;
};

struct TrainConfig {
  nnet::ModelConfig model;
  nnet::AdamConfig adam;
  std::size_t batch_size = 64;
  std::size_t patience = 5;
  std::size_t max_epochs = 50;
};

struct TrainResult {
  nnet::Network<float> net;
  std::vector<double> train_loss;  // per epoch, weighted mean per sample
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;      // 1-based epoch of the returned weights (0 = initial weights)
  bool diverged = false;
  std::string fault;
  double seconds = 0.0;
};

// Trains on the inner-train participants of (outer, seed_idx), early-stopping
// on the inner validation loss. `labels` holds 0/1 per roster participant
// (-1 for anyone not trainable); class weights come from the outer-train set.
TrainResult train_fold(const FoldPlan& plan, std::size_t outer, std::size_t seed_idx, const SampleSource& data,
                       const std::vector<int>& labels, const TrainConfig& cfg, std::uint64_t seed);

// P(positive) for every set of one participant, in set order.
std::vector<float> predict_subject(const nnet::Network<float>& net, const SampleSource& data, std::size_t participant);
// Fraction of probabilities with P >= 0.5.
double score_subject(const std::vector<float>& probs);

struct ScoreRow {
  std::string participant_id;
  Group group = Group::C;
  Gender gender = Gender::F;
  int label = -1;  // -1 for zero-shot participants
  int fold = -1;   // -1 for zero-shot participants
  double score = 0.0;
  std::vector<double> per_seed;
};

struct ScoreTable {
  TaskName task = TaskName::CvDS;
  Alignment alignment = Alignment::Response;
  std::vector<ScoreRow> rows;

  std::vector<double> scores() const;
  std::vector<int> labels() const;
  // Rows with a 0/1 label under the table's own task.
  std::vector<std::size_t> labelled() const;

  std::string to_csv() const;
  static ScoreTable from_csv(const std::string& text, const std::string& source = "score table");
};

struct ProtocolConfig {
  std::size_t n_outer = 5;
  std::size_t n_inner = 10;
  double val_fraction = 0.2;
  TrainConfig train;
  std::uint64_t seed = 1;
  // Null replicate: training labels are permuted among the outer-train
  // participants of every (fold, seed) run.
  bool permute_labels = false;
  std::size_t workers = 1;
  std::string checkpoint_dir;  // empty: keep nothing on disk
};

struct RunRecord {
  std::size_t outer = 0;
  std::size_t seed_idx = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool diverged = false;
  std::string fault;
  double seconds = 0.0;
};

struct ProtocolResult {
  FoldPlan plan;
  std::vector<std::string> participant_ids;  // roster order, as indexed by the plan
  ScoreTable table;
  std::vector<RunRecord> runs;
  // Per-seed AUC over labelled participants (empty entries when undefined).
  std::vector<std::optional<double>> seed_auc;
};

using ProgressFn = std::function<void(const RunRecord&)>;

// Full nested protocol. Test participants are scored by their own fold's
// model; zero-shot participants by every outer model, averaged. The final
// score is the mean over inner seeds.
ProtocolResult run_protocol(const SampleSource& data, const std::vector<Participant>& roster, const TaskSpec& task,
                            Alignment alignment, const ProtocolConfig& cfg, const ProgressFn& progress = {});

// Labels under a task for every roster entry (-1 for zero-shot groups).
std::vector<int> task_labels(const std::vector<Participant>& roster, const TaskSpec& task);

// Run manifest for a finished protocol.
std::string run_manifest_json(const ProtocolResult& result, const ProtocolConfig& cfg, const std::string& config_hash);

}  // namespace gazenet
