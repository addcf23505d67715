#include "gazenet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "gazenet/parallel.hpp"
#include "gazenet/stats.hpp"

namespace gazenet {

std::vector<Participant> roster_of(const SegmentStore& store) {
  std::vector<Participant> out;
  for (const auto& p : store.participants) {
    Participant q;
    q.id = p.participant_id;
    q.group = p.group;
    q.gender = p.gender;
    out.push_back(q);
  }
  return out;
}

std::vector<Participant> roster_of(const Cohort& cohort) {
  std::vector<Participant> out;
  for (const auto& p : cohort.participants) out.push_back(p.info);
  return out;
}

std::vector<int> task_labels(const std::vector<Participant>& roster, const TaskSpec& task) {
  std::vector<int> out;
  out.reserve(roster.size());
  for (const auto& p : roster) out.push_back(task.label(p.group).value_or(-1));
  return out;
}

// ---------------------------------------------------------------------------
// Fold planning
// ---------------------------------------------------------------------------

std::vector<std::size_t> FoldPlan::outer_train(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < outer.size(); ++f) {
    if (f == fold) continue;
    out.insert(out.end(), outer[f].begin(), outer[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> FoldPlan::fold_of(std::size_t participant) const {
  for (std::size_t f = 0; f < outer.size(); ++f) {
    if (std::find(outer[f].begin(), outer[f].end(), participant) != outer[f].end()) return f;
  }
  return std::nullopt;
}

namespace {

// Participants grouped by (group, gender) in a fixed stratum order, each
// stratum shuffled, then concatenated.
std::vector<std::size_t> stratified_order(const std::vector<Participant>& roster, const std::vector<std::size_t>& members,
                                          Rng& rng) {
  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  for (auto i : members) strata[{static_cast<int>(roster[i].group), static_cast<int>(roster[i].gender)}].push_back(i);
  std::vector<std::size_t> out;
  for (auto& [key, list] : strata) {
    rng.shuffle(list);
    out.insert(out.end(), list.begin(), list.end());
  }
  return out;
}

}  // namespace

FoldPlan plan_folds(const std::vector<Participant>& roster, const TaskSpec& task, std::uint64_t seed,
                    std::size_t n_outer, std::size_t n_inner, double val_fraction) {
  if (n_outer < 2) throw ConfigError("at least two outer folds required");
  if (n_inner == 0) throw ConfigError("at least one inner split required");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("validation fraction must lie in (0,1)");
  FoldPlan plan;
  plan.task = task;
  plan.seed = seed;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (task.in_task(roster[i].group)) {
      members.push_back(i);
    } else {
      plan.zero_shot.push_back(i);
    }
  }
  if (members.size() < n_outer) {
    throw ConfigError("plan: " + std::to_string(members.size()) + " participants in task " +
                      std::string(to_string(task.name)) + " cannot fill " + std::to_string(n_outer) + " folds");
  }

  Rng rng(derive_seed(seed, {"folds", to_string(task.name)}));
  const auto order = stratified_order(roster, members, rng);
  plan.outer.assign(n_outer, {});
  for (std::size_t i = 0; i < order.size(); ++i) plan.outer[i % n_outer].push_back(order[i]);
  for (auto& f : plan.outer) std::sort(f.begin(), f.end());

  const auto stride = static_cast<std::size_t>(std::llround(1.0 / val_fraction));
  plan.inner.assign(n_outer, {});
  for (std::size_t f = 0; f < n_outer; ++f) {
    const auto train = plan.outer_train(f);
    for (std::size_t s = 0; s < n_inner; ++s) {
      Rng irng(derive_seed(seed, {"inner", to_string(task.name), std::to_string(f), std::to_string(s)}));
      const auto inner_order = stratified_order(roster, train, irng);
      const std::size_t offset = irng.index(stride);
      InnerSplit split;
      for (std::size_t i = 0; i < inner_order.size(); ++i) {
        ((i + offset) % stride == 0 ? split.val : split.train).push_back(inner_order[i]);
      }
      std::sort(split.train.begin(), split.train.end());
      std::sort(split.val.begin(), split.val.end());
      plan.inner[f].push_back(std::move(split));
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

SampleSource::SampleSource(const SegmentStore& segments, const SetStore& sets, AblationMode ablation)
    : segments_(&segments), sets_(&sets), ablation_(ablation) {
  if (segments.participants.size() != sets.participants.size()) {
    throw DependencyError("set store does not match the segment store");
  }
  if (ablation == AblationMode::ShuffledSentiment) {
    throw ConfigError("shuffled_sentiment is applied to segments before set construction");
  }
}

std::size_t SampleSource::sets_of(std::size_t participant) const {
  const auto& ps = sets_->participants.at(participant);
  return std::min(ps.negative.size(), ps.positive.size());
}

void SampleSource::fill(std::size_t participant, std::size_t set_index, float* neg, float* pos) const {
  InputSample s;
  s.participant = participant;
  s.set_index = set_index;
  s.ablation = ablation_;
  const std::size_t n = input_size();
  materialize(segments_->participants[participant], sets_->participants[participant], s, std::span<float>(neg, n),
              std::span<float>(pos, n));
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

struct SampleRef {
  std::size_t participant;
  std::size_t set_index;
};

std::vector<SampleRef> samples_of(const SampleSource& data, const std::vector<std::size_t>& who,
                                  const std::vector<int>& labels) {
  std::vector<SampleRef> out;
  for (auto p : who) {
    if (labels[p] < 0) continue;
    for (std::size_t i = 0; i < data.sets_of(p); ++i) out.push_back({p, i});
  }
  return out;
}

double mean_loss(const nnet::Network<float>& net, nnet::Workspace<float>& ws, const SampleSource& data,
                 const std::vector<SampleRef>& samples, const std::vector<int>& labels, const nnet::ClassWeights& w,
                 std::vector<float>& neg, std::vector<float>& pos) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    data.fill(s.participant, s.set_index, neg.data(), pos.data());
    const int y = labels[s.participant];
    total += nnet::bce_loss(net.forward(neg.data(), pos.data(), data.set_size(), ws), y, w.of(y));
  }
  return total / static_cast<double>(samples.size());
}

}  // namespace

TrainResult train_fold(const FoldPlan& plan, std::size_t outer, std::size_t seed_idx, const SampleSource& data,
                       const std::vector<int>& labels, const TrainConfig& cfg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (outer >= plan.n_outer() || seed_idx >= plan.n_inner()) throw ConfigError("fold index out of range");
  if (labels.size() != data.participants()) throw ConfigError("label vector does not match the participants");
  nnet::ModelConfig mcfg = cfg.model;
  mcfg.length = data.length();

  const auto& split = plan.inner[outer][seed_idx];
  const auto train = samples_of(data, split.train, labels);
  auto val = samples_of(data, split.val, labels);
  if (train.empty()) throw ConfigError("fold has no training samples");

  std::size_t n_neg = 0, n_pos = 0;
  for (const auto& s : samples_of(data, plan.outer_train(outer), labels)) (labels[s.participant] == 1 ? n_pos : n_neg)++;
  const auto weights = nnet::ClassWeights::from_counts(n_neg, n_pos);

  const std::string tag = std::to_string(outer) + "/" + std::to_string(seed_idx);
  TrainResult res{nnet::Network<float>(mcfg), {}, {}, 0, false, {}, 0.0};
  res.net.init(derive_seed(seed, {"init", tag}));
  nnet::Adam<float> opt(res.net.params().size(), cfg.adam);
  nnet::Workspace<float> ws;
  std::vector<float> neg(data.input_size()), pos(data.input_size());
  std::vector<float> grad(res.net.params().size());

  // Without validation participants, stop on the training loss.
  const bool use_train_for_stop = val.empty();
  std::vector<float> best(res.net.params().begin(), res.net.params().end());
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<SampleRef> order = train;

  try {
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
      Rng rng(derive_seed(seed, {"epoch", tag, std::to_string(epoch)}));
      rng.shuffle(order);
      double epoch_loss = 0.0;
      for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
        const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
        const float inv = 1.0f / static_cast<float>(b1 - b0);
        std::fill(grad.begin(), grad.end(), 0.0f);
        for (std::size_t i = b0; i < b1; ++i) {
          const auto& s = order[i];
          data.fill(s.participant, s.set_index, neg.data(), pos.data());
          const int y = labels[s.participant];
          const float p = res.net.forward(neg.data(), pos.data(), data.set_size(), ws);
          const double l = nnet::bce_loss(p, y, weights.of(y));
          if (!std::isfinite(l)) throw ModelFault("non-finite training loss");
          epoch_loss += l;
          res.net.backward(ws, static_cast<float>(nnet::bce_dlogit(p, y, weights.of(y))) * inv, grad);
        }
        opt.step(res.net.mutable_params(), grad);
        res.net.sync();
      }
      res.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
      const double stop_loss =
          use_train_for_stop ? res.train_loss.back() : mean_loss(res.net, ws, data, val, labels, weights, neg, pos);
      if (!std::isfinite(stop_loss)) throw ModelFault("non-finite validation loss");
      res.val_loss.push_back(stop_loss);
      if (stop_loss < best_loss) {
        best_loss = stop_loss;
        best.assign(res.net.params().begin(), res.net.params().end());
        res.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  } catch (const ModelFault& e) {
    res.diverged = true;
    res.fault = e.what();
  }
  auto dst = res.net.mutable_params();
  std::copy(best.begin(), best.end(), dst.begin());
  res.net.sync();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<float> predict_subject(const nnet::Network<float>& net, const SampleSource& data, std::size_t participant) {
  nnet::Workspace<float> ws;
  std::vector<float> neg(data.input_size()), pos(data.input_size());
  std::vector<float> out;
  for (std::size_t i = 0; i < data.sets_of(participant); ++i) {
    data.fill(participant, i, neg.data(), pos.data());
    out.push_back(net.forward(neg.data(), pos.data(), data.set_size(), ws));
  }
  return out;
}

double score_subject(const std::vector<float>& probs) {
  if (probs.empty()) return 0.0;
  std::size_t hits = 0;
  for (float p : probs) hits += p >= 0.5f ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(probs.size());
}

// ---------------------------------------------------------------------------
// Score tables
// ---------------------------------------------------------------------------

std::vector<double> ScoreTable::scores() const {
  std::vector<double> out;
  for (auto i : labelled()) out.push_back(rows[i].score);
  return out;
}

std::vector<int> ScoreTable::labels() const {
  std::vector<int> out;
  for (auto i : labelled()) out.push_back(rows[i].label);
  return out;
}

std::vector<std::size_t> ScoreTable::labelled() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label >= 0) out.push_back(i);
  }
  return out;
}

std::string ScoreTable::to_csv() const {
  std::string out = "participant_id,group,gender,task,alignment,label,fold,score,per_seed_scores\n";
  for (const auto& r : rows) {
    std::string seeds;
    for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
      if (i) seeds += ';';
      seeds += format_double(r.per_seed[i]);
    }
    out += r.participant_id + "," + std::string(to_string(r.group)) + "," + std::string(to_string(r.gender)) + "," +
           std::string(to_string(task)) + "," + std::string(to_string(alignment)) + "," + std::to_string(r.label) +
           "," + std::to_string(r.fold) + "," + format_double(r.score) + "," + seeds + "\n";
  }
  return out;
}

ScoreTable ScoreTable::from_csv(const std::string& text, const std::string& source) {
  ScoreTable t;
  std::size_t line_no = 0, pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    if (first) {
      first = false;
      if (trim(line) != "participant_id,group,gender,task,alignment,label,fold,score,per_seed_scores") {
        throw ParseError(source, line_no, "unexpected score table header");
      }
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 9) throw ParseError(source, line_no, "expected 9 fields");
    ScoreRow r;
    try {
      r.participant_id = std::string(trim(f[0]));
      r.group = parse_group(trim(f[1]));
      r.gender = parse_gender(trim(f[2]));
      t.task = parse_task(trim(f[3]));
      t.alignment = parse_alignment(trim(f[4]));
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
    r.label = static_cast<int>(parse_int(trim(f[5]), source, line_no));
    r.fold = static_cast<int>(parse_int(trim(f[6]), source, line_no));
    r.score = parse_double(trim(f[7]), source, line_no);
    std::string_view seeds = trim(f[8]);
    while (!seeds.empty()) {
      const auto semi = seeds.find(';');
      r.per_seed.push_back(parse_double(seeds.substr(0, semi), source, line_no));
      if (semi == std::string_view::npos) break;
      seeds.remove_prefix(semi + 1);
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

namespace {

// Labels of the outer-train participants shuffled among themselves, within
// the fold; everyone else keeps the original label.
std::vector<int> permuted_labels(const FoldPlan& plan, std::size_t outer, std::size_t seed_idx,
                                 const std::vector<int>& labels) {
  auto out = labels;
  const auto members = plan.outer_train(outer);
  std::vector<int> pool;
  for (auto p : members) pool.push_back(labels[p]);
  Rng rng(derive_seed(plan.seed, {"permute", std::to_string(outer), std::to_string(seed_idx)}));
  rng.shuffle(pool);
  for (std::size_t i = 0; i < members.size(); ++i) out[members[i]] = pool[i];
  return out;
}


}  // namespace

ProtocolResult run_protocol(const SampleSource& data, const std::vector<Participant>& roster, const TaskSpec& task,
                            Alignment alignment, const ProtocolConfig& cfg, const ProgressFn& progress) {
  if (roster.size() != data.participants()) throw ConfigError("roster does not match the sample source");
  // Participants without sets cannot be trained on or scored.
  std::vector<Participant> usable_roster;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (data.sets_of(i) > 0) usable.push_back(i);
  }
  for (auto i : usable) usable_roster.push_back(roster[i]);

  ProtocolResult result;
  FoldPlan local = plan_folds(usable_roster, task, cfg.seed, cfg.n_outer, cfg.n_inner, cfg.val_fraction);
  // Map plan indices back onto the source's participant indices.
  auto remap = [&usable](std::vector<std::size_t>& v) {
    for (auto& i : v) i = usable[i];
  };
  for (auto& f : local.outer) remap(f);
  remap(local.zero_shot);
  for (auto& f : local.inner) {
    for (auto& s : f) {
      remap(s.train);
      remap(s.val);
    }
  }
  result.plan = local;
  for (const auto& p : roster) result.participant_ids.push_back(p.id);
  const FoldPlan& plan = result.plan;
  const auto labels = task_labels(roster, task);

  const std::size_t n_runs = cfg.n_outer * cfg.n_inner;
  // scores[run][participant]; NaN where the run does not score the participant
  std::vector<std::vector<double>> run_scores(n_runs, std::vector<double>(roster.size(), std::nan("")));
  result.runs.resize(n_runs);
  std::mutex progress_mutex;

  parallel_for(n_runs, cfg.workers, [&](std::size_t r) {
    const std::size_t o = r / cfg.n_inner, s = r % cfg.n_inner;
    const auto train_labels = cfg.permute_labels ? permuted_labels(plan, o, s, labels) : labels;
    TrainResult tr = train_fold(plan, o, s, data, train_labels, cfg.train, cfg.seed);
    for (auto p : plan.outer[o]) run_scores[r][p] = score_subject(predict_subject(tr.net, data, p));
    for (auto p : plan.zero_shot) run_scores[r][p] = score_subject(predict_subject(tr.net, data, p));

    RunRecord rec;
    rec.outer = o;
    rec.seed_idx = s;
    rec.epochs = tr.val_loss.size();
    rec.best_epoch = tr.best_epoch;
    rec.best_val_loss = tr.best_epoch > 0 ? tr.val_loss[tr.best_epoch - 1] : std::nan("");
    rec.diverged = tr.diverged;
    rec.fault = tr.fault;
    rec.seconds = tr.seconds;
    result.runs[r] = rec;
    if (!cfg.checkpoint_dir.empty()) {
      const std::string base = cfg.checkpoint_dir + "/run_o" + std::to_string(o) + "_s" + std::to_string(s);
      nnet::write_checkpoint(base + ".gznp", tr.net);
      nlohmann::ordered_json meta;
      meta["T"] = tr.net.config().length;
      meta["F"] = tr.net.config().filters;
      meta["hidden"] = tr.net.config().hidden;
      meta["share_directions"] = tr.net.config().share_directions;
      meta["seed"] = cfg.seed;
      meta["task"] = to_string(task.name);
      meta["alignment"] = to_string(alignment);
      meta["outer"] = o;
      meta["inner_seed"] = s;
      meta["best_epoch"] = tr.best_epoch;
      meta["permuted_labels"] = cfg.permute_labels;
      write_file(base + ".json", meta.dump(2) + "\n");
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(rec);
    }
  });

  ScoreTable& table = result.table;
  table.task = task.name;
  table.alignment = alignment;
  for (auto p : usable) {
    ScoreRow row;
    row.participant_id = roster[p].id;
    row.group = roster[p].group;
    row.gender = roster[p].gender;
    row.label = labels[p];
    const auto fold = plan.fold_of(p);
    row.fold = fold ? static_cast<int>(*fold) : -1;
    for (std::size_t s = 0; s < cfg.n_inner; ++s) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t o = 0; o < cfg.n_outer; ++o) {
        const double v = run_scores[o * cfg.n_inner + s][p];
        if (!std::isnan(v)) {
          sum += v;
          ++n;
        }
      }
      row.per_seed.push_back(n ? sum / static_cast<double>(n) : 0.0);
    }
    double total = 0.0;
    for (double v : row.per_seed) total += v;
    row.score = total / static_cast<double>(row.per_seed.size());
    table.rows.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < cfg.n_inner; ++s) {
    std::vector<double> sc;
    std::vector<int> lb;
    for (const auto& row : table.rows) {
      if (row.label < 0) continue;
      sc.push_back(row.per_seed[s]);
      lb.push_back(row.label);
    }
    try {
      result.seed_auc.push_back(roc_auc(sc, lb));
    } catch (const MetricError&) {
      result.seed_auc.push_back(std::nullopt);
    }
  }
  return result;
}

std::string run_manifest_json(const ProtocolResult& result, const ProtocolConfig& cfg, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["task"] = to_string(result.table.task);
  j["alignment"] = to_string(result.table.alignment);
  j["master_seed"] = cfg.seed;
  j["permuted_labels"] = cfg.permute_labels;
  j["n_outer"] = cfg.n_outer;
  j["n_inner"] = cfg.n_inner;
  j["model"] = {{"T", cfg.train.model.length},
                {"F", cfg.train.model.filters},
                {"hidden", cfg.train.model.hidden},
                {"share_directions", cfg.train.model.share_directions}};
  j["training"] = {{"batch_size", cfg.train.batch_size},
                   {"lr", cfg.train.adam.lr},
                   {"patience", cfg.train.patience},
                   {"max_epochs", cfg.train.max_epochs}};
  auto& folds = j["folds"];
  folds = nlohmann::ordered_json::array();
  for (const auto& f : result.plan.outer) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (auto p : f) ids.push_back(result.participant_ids.at(p));
    folds.push_back(ids);
  }
  auto& runs = j["runs"];
  runs = nlohmann::ordered_json::array();
  double total = 0.0;
  for (const auto& r : result.runs) {
    nlohmann::ordered_json rj;
    rj["outer"] = r.outer;
    rj["inner_seed"] = r.seed_idx;
    rj["run_seed"] = derive_seed(cfg.seed, {"init", std::to_string(r.outer) + "/" + std::to_string(r.seed_idx)});
    rj["epochs"] = r.epochs;
    rj["best_epoch"] = r.best_epoch;
    rj["best_val_loss"] = std::isnan(r.best_val_loss) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.best_val_loss);
    rj["diverged"] = r.diverged;
    if (r.diverged) rj["fault"] = r.fault;
    rj["seconds"] = r.seconds;
    total += r.seconds;
    runs.push_back(rj);
  }
  j["total_seconds"] = total;
  auto& sa = j["seed_auc"];
  sa = nlohmann::ordered_json::array();
  for (const auto& v : result.seed_auc) sa.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
  return j.dump(2);
}

}  // namespace gazenet
