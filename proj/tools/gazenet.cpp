// gazenet: command-line driver for the eye-tracking classification pipeline.
//
// Stage outputs live under the work directory (config [paths] work_dir, or
// $GAZENET_CACHE_DIR when set). Every stage directory holds a manifest.json
// written last; a directory without one is a partial artifact.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gazenet/attribute.hpp"
#include "gazenet/config.hpp"
#include "gazenet/corpus.hpp"
#include "gazenet/harness.hpp"
#include "gazenet/parallel.hpp"
#include "gazenet/preprocess.hpp"
#include "gazenet/sampler.hpp"
#include "gazenet/segment.hpp"
#include "gazenet/stats.hpp"
#include "gazenet/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gazenet;

namespace {

struct Context {
  RunConfig cfg;
  std::string work;
  bool force = false;
  bool json_log = false;
  std::size_t workers = 1;
};

void log(const Context& ctx, const std::string& event, const json& fields = json::object()) {
  if (ctx.json_log) {
    json line;
    line["event"] = event;
    for (const auto& [k, v] : fields.items()) line[k] = v;
    std::cout << line.dump() << std::endl;
    return;
  }
  std::cout << event;
  for (const auto& [k, v] : fields.items()) std::cout << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
  std::cout << std::endl;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IngestError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// Layout of the work directory.
struct Paths {
  const Context& ctx;
  std::string clean() const { return ctx.work + "/clean"; }
  std::string segments(const RunConfig& c) const { return ctx.work + "/segments/" + c.stage_hash(Stage::Segment); }
  std::string sets(const RunConfig& c) const { return ctx.work + "/sets/" + c.stage_hash(Stage::Sets); }
  std::string runs(const RunConfig& c) const { return ctx.work + "/runs/" + c.stage_hash(Stage::Train); }
  std::string eval(const RunConfig& c) const { return ctx.work + "/eval/" + c.stage_hash(Stage::Eval); }
  std::string attribute(const RunConfig& c) const { return ctx.work + "/attribute/" + c.stage_hash(Stage::Attribute); }
  std::string sweep(const RunConfig& c) const { return ctx.work + "/sweep/" + c.hash(); }
};

// Returns true when the stage is already complete with the expected hash.
// A partial directory, or a finished one with another hash, is an error
// unless --force, in which case it is wiped for recomputation.
bool stage_done(const Context& ctx, const std::string& dir, const std::string& expected_hash) {
  const std::string manifest = dir + "/manifest.json";
  if (fs::exists(manifest) && !ctx.force) {
    const auto got = read_json(manifest).value("config_hash", std::string());
    if (got != expected_hash) {
      throw ConfigError(dir + ": artifact config hash " + got + " does not match " + expected_hash +
                        " (use --force to rebuild)");
    }
    return true;
  }
  if (fs::exists(dir) && !ctx.force && !fs::is_empty(dir)) {
    throw DependencyError(dir + ": partial artifacts without a manifest (use --force to rebuild)");
  }
  fs::remove_all(dir);
  fs::create_directories(dir);
  return false;
}

// Reads a finished upstream stage, checking its hash.
json require_stage(const Context& ctx, const std::string& dir, const std::string& expected_hash,
                   const std::string& what, const std::string& command) {
  const std::string manifest = dir + "/manifest.json";
  if (!fs::exists(manifest)) {
    throw DependencyError("missing " + what + " (" + dir + "); run `gazenet " + command + "` first");
  }
  json j = read_json(manifest);
  const auto got = j.value("config_hash", std::string());
  if (got != expected_hash && !ctx.force) {
    throw ConfigError(what + " in " + dir + " were built with config hash " + got + ", current is " +
                      expected_hash + " (use --force to accept)");
  }
  return j;
}

// ---------------------------------------------------------------------------
// Stage loaders
// ---------------------------------------------------------------------------

Cohort load_corpus(const Context& ctx) {
  const std::string prov = ctx.cfg.corpus_dir + "/manifest.json";
  if (fs::exists(prov)) {
    const auto got = read_json(prov).value("config_hash", std::string());
    if (got != ctx.cfg.stage_hash(Stage::Synth) && !ctx.force) {
      throw ConfigError("corpus " + ctx.cfg.corpus_dir + " was generated with config hash " + got +
                        " (use --force to accept)");
    }
  }
  if (!fs::exists(CohortPaths::under(ctx.cfg.corpus_dir).roster)) {
    throw DependencyError("missing corpus at " + ctx.cfg.corpus_dir + "; run `gazenet synth` or point [paths] corpus_dir at one");
  }
  // Missed and uncovered trials are flagged here; no sentence list is configured.
  return exclude_trials(load_cohort(CohortPaths::under(ctx.cfg.corpus_dir)), {});
}

std::vector<CleanRecording> load_clean(const Context& ctx, const Cohort& cohort) {
  const Paths paths{ctx};
  require_stage(ctx, paths.clean(), ctx.cfg.stage_hash(Stage::Preprocess), "preprocessed recordings", "preprocess");
  std::vector<CleanRecording> out;
  for (const auto& p : cohort.participants) {
    out.push_back(read_clean(paths.clean() + "/" + p.info.id + ".csv", p.info.id));
  }
  return out;
}

SegmentStore load_segments(const Context& ctx, const RunConfig& cfg) {
  const std::string dir = Paths{ctx}.segments(cfg);
  const json m = require_stage(ctx, dir, cfg.stage_hash(Stage::Segment), "segments", "segment");
  SegmentStore store;
  store.alignment = parse_alignment(m.at("alignment").get<std::string>());
  store.length = m.at("length").get<std::size_t>();
  for (const auto& p : m.at("participants")) {
    const auto id = p.at("id").get<std::string>();
    store.participants.push_back(read_segments(dir + "/" + id + ".bin", id, parse_group(p.at("group").get<std::string>()),
                                               parse_gender(p.at("gender").get<std::string>())));
  }
  return store;
}

SetStore load_sets(const Context& ctx, const RunConfig& cfg, const SegmentStore& segs) {
  const std::string dir = Paths{ctx}.sets(cfg);
  require_stage(ctx, dir, cfg.stage_hash(Stage::Sets), "bootstrap sets", "sets");
  return read_set_manifest(dir + "/sets.csv", segs);
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

void stage_synth(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::string dir = cfg.corpus_dir;
  const std::string hash = cfg.stage_hash(Stage::Synth);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "synth.up_to_date", {{"dir", dir}});
    return;
  }
  const Cohort c = generate_cohort(dir, cfg.synth, cfg.effect, cfg.seed);
  write_json(dir + "/manifest.json", {{"stage", "synth"}, {"config_hash", hash}, {"participants", c.participants.size()}});
  log(ctx, "synth.done", {{"dir", dir}, {"participants", c.participants.size()}});
}

void stage_preprocess(const Context& ctx) {
  const Paths paths{ctx};
  const std::string hash = ctx.cfg.stage_hash(Stage::Preprocess);
  if (stage_done(ctx, paths.clean(), hash)) {
    log(ctx, "preprocess.up_to_date", {{"dir", paths.clean()}});
    return;
  }
  const Cohort cohort = load_corpus(ctx);
  std::vector<json> rows(cohort.participants.size());
  parallel_for(cohort.participants.size(), ctx.workers, [&](std::size_t i) {
    const auto& p = cohort.participants[i];
    const CleanRecording rec = preprocess_participant(p.gaze);
    write_clean(paths.clean() + "/" + p.info.id + ".csv", rec);
    rows[i] = {{"id", p.info.id},
               {"interpolated_fraction", rec.interpolated_fraction},
               {"flagged_for_exclusion", rec.flagged_for_exclusion},
               {"warnings", rec.warnings}};
  });
  json m{{"stage", "preprocess"}, {"config_hash", hash}, {"participants", rows}};
  m["issues"] = json::array();
  for (const auto& is : cohort.issues) m["issues"].push_back({{"participant", is.participant_id}, {"message", is.message}});
  write_json(paths.clean() + "/manifest.json", m);
  log(ctx, "preprocess.done", {{"participants", rows.size()}});
}

void stage_segment(const Context& ctx, const RunConfig& cfg) {
  const std::string dir = Paths{ctx}.segments(cfg);
  const std::string hash = cfg.stage_hash(Stage::Segment);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "segment.up_to_date", {{"dir", dir}});
    return;
  }
  const Cohort cohort = load_corpus(ctx);
  const auto cleans = load_clean(ctx, cohort);
  const SegmentStore store = segment_cohort(cohort, cleans, cfg.alignment, cfg.trial_fraction);
  json parts = json::array();
  for (const auto& p : store.participants) {
    write_segments(dir + "/" + p.participant_id + ".bin", p, store.alignment, store.length);
    json dropped = json::array();
    for (const auto& d : p.dropped) dropped.push_back({{"trial", d.trial_id}, {"reason", d.reason}});
    parts.push_back({{"id", p.participant_id},
                     {"group", to_string(p.group)},
                     {"gender", to_string(p.gender)},
                     {"negative", p.negative.size()},
                     {"positive", p.positive.size()},
                     {"dropped", dropped}});
  }
  write_json(dir + "/manifest.json", {{"stage", "segment"},
                                      {"config_hash", hash},
                                      {"alignment", to_string(store.alignment)},
                                      {"length", store.length},
                                      {"trial_fraction", cfg.trial_fraction},
                                      {"warnings", store.warnings},
                                      {"participants", parts}});
  log(ctx, "segment.done", {{"dir", dir}, {"participants", store.participants.size()}});
}

void stage_sets(const Context& ctx, const RunConfig& cfg) {
  const std::string dir = Paths{ctx}.sets(cfg);
  const std::string hash = cfg.stage_hash(Stage::Sets);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "sets.up_to_date", {{"dir", dir}});
    return;
  }
  const SegmentStore segs = load_segments(ctx, cfg);
  const SetStore sets = make_sets(segs, cfg.set_size, cfg.n_sets, cfg.seed);
  write_set_manifest(dir + "/sets.csv", segs, sets);
  write_json(dir + "/manifest.json", {{"stage", "sets"},
                                      {"config_hash", hash},
                                      {"set_size", cfg.set_size},
                                      {"n_sets", cfg.n_sets},
                                      {"skipped", sets.skipped}});
  log(ctx, "sets.done", {{"dir", dir}, {"skipped", sets.skipped.size()}});
}

void stage_train(const Context& ctx, const RunConfig& cfg) {
  const std::string dir = Paths{ctx}.runs(cfg);
  const std::string hash = cfg.stage_hash(Stage::Train);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "train.up_to_date", {{"dir", dir}});
    return;
  }
  SegmentStore segs = load_segments(ctx, cfg);
  SetStore sets = load_sets(ctx, cfg, segs);
  AblationMode mode = cfg.ablation;
  if (mode == AblationMode::ShuffledSentiment) {
    segs = shuffle_sentiment(segs, derive_seed(cfg.seed, {"shuffle_sentiment"}));
    sets = make_sets(segs, cfg.set_size, cfg.n_sets, cfg.seed);
    mode = AblationMode::None;
  }
  const SampleSource source(segs, sets, mode);
  const auto roster = roster_of(segs);
  const TaskSpec task = TaskSpec::make(cfg.task);

  ProtocolConfig pc = cfg.protocol_config(ctx.workers);
  pc.checkpoint_dir = dir + "/checkpoints";
  fs::create_directories(pc.checkpoint_dir);
  auto progress = [&ctx](const char* kind) {
    return [&ctx, kind](const RunRecord& r) {
      log(ctx, std::string("train.run"), {{"kind", kind}, {"outer", r.outer}, {"seed", r.seed_idx}, {"epochs", r.epochs},
                                          {"best_epoch", r.best_epoch}, {"diverged", r.diverged}, {"seconds", r.seconds}});
    };
  };
  const ProtocolResult result = run_protocol(source, roster, task, cfg.alignment, pc, progress("model"));
  write_file(dir + "/scores.csv", result.table.to_csv());
  write_file(dir + "/run_manifest.json", run_manifest_json(result, pc, hash) + "\n");

  if (cfg.permutation) {
    ProtocolConfig null_cfg = pc;
    null_cfg.permute_labels = true;
    null_cfg.checkpoint_dir.clear();
    const ProtocolResult null_result = run_protocol(source, roster, task, cfg.alignment, null_cfg, progress("null"));
    write_file(dir + "/null_scores.csv", null_result.table.to_csv());
    write_file(dir + "/null_run_manifest.json", run_manifest_json(null_result, null_cfg, hash) + "\n");
  }
  std::size_t diverged = 0;
  for (const auto& r : result.runs) diverged += r.diverged ? 1 : 0;
  write_json(dir + "/manifest.json", {{"stage", "train"},
                                      {"config_hash", hash},
                                      {"task", to_string(cfg.task)},
                                      {"alignment", to_string(cfg.alignment)},
                                      {"runs", result.runs.size()},
                                      {"diverged", diverged},
                                      {"permutation", cfg.permutation}});
  log(ctx, "train.done", {{"dir", dir}, {"runs", result.runs.size()}, {"diverged", diverged}});
}

std::vector<std::optional<double>> seed_aucs(const std::string& run_manifest) {
  std::vector<std::optional<double>> out;
  for (const auto& v : read_json(run_manifest).at("seed_auc")) {
    out.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  return out;
}

ScoreTable load_scores(const Context& ctx, const RunConfig& cfg) {
  const std::string dir = Paths{ctx}.runs(cfg);
  if (!fs::exists(dir + "/manifest.json")) {
    throw DependencyError("missing checkpoints and scores for task " + std::string(to_string(cfg.task)) + " (" + dir +
                          "); run `gazenet train` first");
  }
  require_stage(ctx, dir, cfg.stage_hash(Stage::Train), "trained models", "train");
  return ScoreTable::from_csv(read_file(dir + "/scores.csv"), dir + "/scores.csv");
}

// Fold plan over the cohort roster restricted to the scored participants, in
// table order; identical to the plan used by the network protocol.
std::pair<Cohort, FoldPlan> baseline_plan(const Cohort& cohort, const ScoreTable& table, const RunConfig& cfg) {
  Cohort sub;
  for (const auto& row : table.rows) {
    const auto* p = cohort.find(row.participant_id);
    if (!p) throw DependencyError("scored participant " + row.participant_id + " missing from the corpus");
    sub.participants.push_back(*p);
  }
  FoldPlan plan = plan_folds(roster_of(sub), TaskSpec::make(cfg.task), cfg.seed, cfg.n_outer, cfg.n_inner,
                             cfg.val_fraction);
  return {std::move(sub), std::move(plan)};
}

EvalReport evaluate_run(const Context& ctx, const RunConfig& cfg) {
  const ScoreTable table = load_scores(ctx, cfg);
  const std::string dir = Paths{ctx}.runs(cfg);
  EvalReport report = evaluate(table, cfg.bootstrap_iters, cfg.seed);
  report.config_hash = cfg.hash();
  report.seed_auc = seed_aucs(dir + "/run_manifest.json");
  if (fs::exists(dir + "/null_scores.csv")) {
    const ScoreTable null_table = ScoreTable::from_csv(read_file(dir + "/null_scores.csv"), dir + "/null_scores.csv");
    const auto idx = null_table.labelled();
    std::vector<double> s;
    std::vector<int> y;
    for (auto i : idx) {
      s.push_back(null_table.rows[i].score);
      y.push_back(null_table.rows[i].label);
    }
    report.p_perm = permutation_p(report.auc_ci.lo, s, y, cfg.bootstrap_iters, derive_seed(cfg.seed, {"permutation"}));
  }
  return report;
}

void stage_eval(const Context& ctx, const RunConfig& cfg) {
  const Paths paths{ctx};
  const std::string dir = paths.eval(cfg);
  const std::string hash = cfg.stage_hash(Stage::Eval);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "eval.up_to_date", {{"dir", dir}});
    return;
  }
  const EvalReport report = evaluate_run(ctx, cfg);
  write_file(dir + "/report.json", report.to_json() + "\n");
  const ScoreTable table = load_scores(ctx, cfg);
  write_file(dir + "/roc.csv", roc_csv(roc_curve(table.scores(), table.labels())));

  // Behavioural baselines under the same outer folds.
  const Cohort cohort = load_corpus(ctx);
  const auto cleans = load_clean(ctx, cohort);
  const auto [sub, plan] = baseline_plan(cohort, table, cfg);
  std::vector<CleanRecording> sub_cleans;
  for (const auto& p : sub.participants) {
    for (const auto& c : cleans) {
      if (c.participant_id == p.info.id) sub_cleans.push_back(c);
    }
  }
  EvalReport fix = baseline_fixation_ratio(sub, sub_cleans, ScreenGeometry{}, plan, cfg.density_window_ms,
                                           cfg.bootstrap_iters, cfg.seed);
  EvalReport resp = baseline_response_only(sub, plan, cfg.bootstrap_iters, cfg.seed);
  fix.config_hash = resp.config_hash = cfg.hash();
  json baselines;
  baselines["fixation_ratio"] = json::parse(fix.to_json());
  baselines["response_only"] = json::parse(resp.to_json());
  baselines["logistic"] = {{"lr", LogisticConfig{}.lr}, {"iterations", LogisticConfig{}.iterations}, {"l2", LogisticConfig{}.l2}};
  write_json(dir + "/baselines.json", baselines);

  // Cross-task matrix and alignment comparisons over whatever runs exist.
  std::map<TaskName, ScoreTable> tables;
  for (TaskName t : kTasks) {
    RunConfig other = cfg;
    other.task = t;
    if (fs::exists(paths.runs(other) + "/manifest.json")) tables[t] = load_scores(ctx, other);
  }
  write_file(dir + "/cross_task.csv", cross_task_csv(cross_task_matrix(tables, cfg.bootstrap_iters, cfg.seed)));

  json comparisons = json::array();
  std::vector<double> pvals;
  for (TaskName t : kTasks) {
    RunConfig a = cfg, b = cfg;
    a.task = b.task = t;
    a.alignment = Alignment::Response;
    b.alignment = Alignment::Reading;
    if (!fs::exists(paths.runs(a) + "/manifest.json") || !fs::exists(paths.runs(b) + "/manifest.json")) continue;
    std::vector<double> xa, xb;
    for (const auto& v : seed_aucs(paths.runs(a) + "/run_manifest.json")) {
      if (v) xa.push_back(*v);
    }
    for (const auto& v : seed_aucs(paths.runs(b) + "/run_manifest.json")) {
      if (v) xb.push_back(*v);
    }
    if (xa.size() < 2 || xb.size() < 2) continue;
    const TestResult tr = welch_t_test(xa, xb);
    pvals.push_back(tr.p);
    comparisons.push_back({{"task", to_string(t)},
                           {"a", "response"},
                           {"b", "reading"},
                           {"t", tr.statistic},
                           {"df", tr.df},
                           {"p", tr.p},
                           {"unit", "per-seed AUC"}});
  }
  const auto adjusted = fdr_bh(pvals);
  for (std::size_t i = 0; i < comparisons.size(); ++i) comparisons[i]["p_fdr"] = adjusted[i];
  write_json(dir + "/comparisons.json", {{"config_hash", cfg.hash()}, {"tests", comparisons}});

  write_json(dir + "/manifest.json", {{"stage", "eval"}, {"config_hash", hash}});
  log(ctx, "eval.done", {{"dir", dir},
                         {"auc", report.auc},
                         {"auc_ci", {report.auc_ci.lo, report.auc_ci.hi}},
                         {"p_perm", report.p_perm ? json(*report.p_perm) : json(nullptr)},
                         {"baseline_fixation_auc", fix.auc},
                         {"baseline_response_auc", resp.auc}});
}

void stage_attribute(const Context& ctx, const RunConfig& cfg) {
  const Paths paths{ctx};
  const std::string dir = paths.attribute(cfg);
  const std::string hash = cfg.stage_hash(Stage::Attribute);
  if (stage_done(ctx, dir, hash)) {
    log(ctx, "attribute.up_to_date", {{"dir", dir}});
    return;
  }
  const std::string runs = paths.runs(cfg);
  require_stage(ctx, runs, cfg.stage_hash(Stage::Train), "trained models", "train");
  const SegmentStore segs = load_segments(ctx, cfg);
  const SetStore sets = load_sets(ctx, cfg, segs);
  const SampleSource source(segs, sets, cfg.ablation == AblationMode::ShuffledSentiment ? AblationMode::None : cfg.ablation);
  const auto roster = roster_of(segs);
  const auto model = cfg.model_config();

  // Weight readout averaged over every saved model.
  std::array<std::vector<double>, 4> readout;
  std::vector<nnet::Network<double>> fold_models;
  for (std::size_t o = 0; o < cfg.n_outer; ++o) {
    for (std::size_t s = 0; s < cfg.n_inner; ++s) {
      const std::string ckpt = runs + "/checkpoints/run_o" + std::to_string(o) + "_s" + std::to_string(s) + ".gznp";
      if (!fs::exists(ckpt)) throw DependencyError("missing checkpoint " + ckpt + "; run `gazenet train --force`");
      const auto net = nnet::read_checkpoint(ckpt, model);
      const auto r = fc_weight_readout(net);
      for (std::size_t c = 0; c < 4; ++c) {
        readout[c].resize(r[c].size(), 0.0);
        for (std::size_t t = 0; t < r[c].size(); ++t) {
          readout[c][t] += r[c][t] / static_cast<double>(cfg.n_outer * cfg.n_inner);
        }
      }
      if (s == 0) fold_models.push_back(net.cast<double>());
    }
  }
  write_file(dir + "/readout.csv", readout_csv(readout));

  // Integrated gradients: each participant through the first-seed model of
  // the fold that tested it (fold 0 for zero-shot participants).
  const ScoreTable table = load_scores(ctx, cfg);
  std::map<std::string, int> fold_of;
  for (const auto& row : table.rows) fold_of[row.participant_id] = row.fold;
  std::vector<std::size_t> todo;
  for (std::size_t p = 0; p < roster.size(); ++p) {
    if (fold_of.count(roster[p].id) && source.sets_of(p) > 0) todo.push_back(p);
  }
  std::vector<SubjectAttribution> subjects(todo.size());
  parallel_for(todo.size(), ctx.workers, [&](std::size_t i) {
    const std::size_t p = todo[i];
    const int fold = std::max(0, fold_of[roster[p].id]);
    subjects[i] = attribute_subject(fold_models[static_cast<std::size_t>(fold)], source, p, roster[p], cfg.ig_steps,
                                    cfg.ig_samples);
  });
  write_file(dir + "/attribution.csv", attribution_csv(aggregate_attributions(subjects)));

  // Fixation density before the response on negative sentences.
  const Cohort cohort = load_corpus(ctx);
  const auto cleans = load_clean(ctx, cohort);
  DensityConfig dc;
  dc.window_ms = cfg.density_window_ms;
  dc.zoom = cfg.density_zoom;
  json dens = json::array();
  for (const auto& m : fixation_density(cohort, cleans, dc)) {
    const std::string name = "density_" + std::string(to_string(m.group)) + ".csv";
    write_file(dir + "/" + name, density_csv(m));
    dens.push_back({{"group", to_string(m.group)}, {"file", name}, {"subjects", m.n_subjects}, {"nx", m.nx}, {"ny", m.ny}});
  }
  write_json(dir + "/manifest.json", {{"stage", "attribute"},
                                      {"config_hash", hash},
                                      {"ig_steps", cfg.ig_steps},
                                      {"ig_samples", cfg.ig_samples},
                                      {"subjects", subjects.size()},
                                      {"density", dens}});
  log(ctx, "attribute.done", {{"dir", dir}, {"subjects", subjects.size()}});
}

void stage_sweep(const Context& ctx) {
  const Paths paths{ctx};
  const std::string dir = paths.sweep(ctx.cfg);
  if (stage_done(ctx, dir, ctx.cfg.hash())) {
    log(ctx, "sweep.up_to_date", {{"dir", dir}});
    return;
  }
  std::string csv = "axis,value,auc,ci_lo,ci_hi,config_hash\n";
  auto point = [&](const std::string& axis, const std::string& value, RunConfig c) {
    c.permutation = false;
    stage_segment(ctx, c);
    stage_sets(ctx, c);
    stage_train(ctx, c);
    const EvalReport r = evaluate(load_scores(ctx, c), c.bootstrap_iters, c.seed);
    csv += axis + "," + value + "," + format_double(r.auc) + "," + format_double(r.auc_ci.lo) + "," +
           format_double(r.auc_ci.hi) + "," + c.hash() + "\n";
    log(ctx, "sweep.point", {{"axis", axis}, {"value", value}, {"auc", r.auc}});
  };
  for (auto v : ctx.cfg.sweep_set_sizes) {
    RunConfig c = ctx.cfg;
    c.set_size = v;
    point("set_size", std::to_string(v), c);
  }
  for (auto v : ctx.cfg.sweep_n_sets) {
    RunConfig c = ctx.cfg;
    c.n_sets = v;
    point("n_sets", std::to_string(v), c);
  }
  for (auto v : ctx.cfg.sweep_trial_fractions) {
    RunConfig c = ctx.cfg;
    c.trial_fraction = v;
    point("trial_fraction", format_double(v), c);
  }
  write_file(dir + "/sweep.csv", csv);
  write_json(dir + "/manifest.json", {{"stage", "sweep"}, {"config_hash", ctx.cfg.hash()}});
  log(ctx, "sweep.done", {{"file", dir + "/sweep.csv"}});
}

int fail(const Context& ctx, const char* kind, const std::string& message, int code) {
  if (ctx.json_log) {
    std::cout << json{{"event", "error"}, {"kind", kind}, {"message", message}}.dump() << std::endl;
  } else {
    std::cerr << "error (" << kind << "): " << message << std::endl;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaze-based classification pipeline: synthetic corpora, preprocessing, training, evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  Context ctx;
  app.add_option("-c,--config", config_path, "run configuration file (key = value with [sections])");
  app.add_flag("--force", ctx.force, "recompute finished stages and accept config-hash mismatches");
  app.add_option("--workers", ctx.workers, "worker threads for per-participant and per-run work")->check(CLI::PositiveNumber);
  app.add_flag("--json", ctx.json_log, "machine-readable JSON log lines");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"synth", "generate a synthetic corpus"},
      {"preprocess", "clean, interpolate, normalize and downsample gaze"},
      {"segment", "cut reading- or response-aligned trial segments"},
      {"sets", "draw bootstrapped trial sets"},
      {"train", "run the nested cross-validation protocol"},
      {"eval", "metrics, confidence intervals, permutation test, baselines"},
      {"attribute", "integrated gradients, weight readout, fixation density"},
      {"sweep", "AUC versus set size, set count and trial fraction"},
      {"run", "synth (if configured corpus is missing) through eval"},
      {"config", "print the effective configuration and its hash"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_path.empty()) ctx.cfg = RunConfig::load(config_path);
    ctx.work = ctx.cfg.work_dir;
    if (const char* env = std::getenv("GAZENET_CACHE_DIR"); env && *env) ctx.work = env;

    if (subs["config"]->parsed()) {
      std::cout << ctx.cfg.to_ini() << "\n; config_hash = " << ctx.cfg.hash() << std::endl;
      return 0;
    }
    if (config_path.empty()) throw ConfigError("--config is required");
    fs::create_directories(ctx.work);
    log(ctx, "start", {{"config", config_path}, {"config_hash", ctx.cfg.hash()}, {"work_dir", ctx.work}});

    if (subs["synth"]->parsed()) stage_synth(ctx);
    if (subs["preprocess"]->parsed()) stage_preprocess(ctx);
    if (subs["segment"]->parsed()) stage_segment(ctx, ctx.cfg);
    if (subs["sets"]->parsed()) stage_sets(ctx, ctx.cfg);
    if (subs["train"]->parsed()) stage_train(ctx, ctx.cfg);
    if (subs["eval"]->parsed()) stage_eval(ctx, ctx.cfg);
    if (subs["attribute"]->parsed()) stage_attribute(ctx, ctx.cfg);
    if (subs["sweep"]->parsed()) stage_sweep(ctx);
    if (subs["run"]->parsed()) {
      if (!fs::exists(CohortPaths::under(ctx.cfg.corpus_dir).roster)) stage_synth(ctx);
      stage_preprocess(ctx);
      stage_segment(ctx, ctx.cfg);
      stage_sets(ctx, ctx.cfg);
      stage_train(ctx, ctx.cfg);
      stage_eval(ctx, ctx.cfg);
    }
    return 0;
  } catch (const ConfigError& e) {
    return fail(ctx, "config", e.what(), 2);
  } catch (const DependencyError& e) {
    return fail(ctx, "dependency", e.what(), 3);
  } catch (const Error& e) {
    return fail(ctx, "pipeline", e.what(), 1);
  } catch (const std::exception& e) {
    return fail(ctx, "internal", e.what(), 1);
  }
}
