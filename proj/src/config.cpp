#include "gazenet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace gazenet {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Synth: return "synth";
    case Stage::Preprocess: return "preprocess";
    case Stage::Segment: return "segment";
    case Stage::Sets: return "sets";
    case Stage::Train: return "train";
    case Stage::Eval: return "eval";
    case Stage::Attribute: return "attribute";
  }
  return "?";
}

namespace {

// Fields outside every stage hash (paths, sweep grids) use kNoStage.
constexpr int kNoStage = 100;

struct Field {
  std::string section;
  std::string key;
  int stage;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

double to_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) bad("expected a finite number, got '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    bad("expected a non-negative integer, got '" + s + "'");
  }
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    bad("integer out of range: '" + s + "'");
  }
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.emplace_back(trim(item));
  if (out.empty()) bad("empty list");
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::string num(double v) { return format_double(v); }
std::string cnt(std::size_t v) { return std::to_string(v); }
std::string boolean(bool v) { return v ? "true" : "false"; }

#define GZ_REAL(sec, name, stage, member)                                                                   \
  Field{sec, name, stage, [](const RunConfig& c) { return num(c.member); },                                 \
        [](RunConfig& c, const std::string& s) { c.member = to_real(s); }}
#define GZ_COUNT(sec, name, stage, member)                                                                  \
  Field{sec, name, stage, [](const RunConfig& c) { return cnt(c.member); },                                 \
        [](RunConfig& c, const std::string& s) { c.member = to_count(s); }}
#define GZ_BOOL(sec, name, stage, member)                                                                   \
  Field{sec, name, stage, [](const RunConfig& c) { return boolean(c.member); },                             \
        [](RunConfig& c, const std::string& s) { c.member = to_bool(s); }}
#define GZ_TEXT(sec, name, stage, member)                                                                   \
  Field{sec, name, stage, [](const RunConfig& c) { return c.member; },                                      \
        [](RunConfig& c, const std::string& s) { c.member = s; }}

const std::vector<Field>& fields() {
  constexpr int synth = static_cast<int>(Stage::Synth);
  constexpr int segment = static_cast<int>(Stage::Segment);
  constexpr int sets = static_cast<int>(Stage::Sets);
  constexpr int train = static_cast<int>(Stage::Train);
  constexpr int eval = static_cast<int>(Stage::Eval);
  constexpr int attribute = static_cast<int>(Stage::Attribute);
  static const std::vector<Field> table = {
      GZ_TEXT("paths", "corpus_dir", kNoStage, corpus_dir),
      GZ_TEXT("paths", "work_dir", kNoStage, work_dir),

      Field{"seed", "master", synth, [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, const std::string& s) { c.seed = to_count(s); }},

      GZ_COUNT("synth", "n_per_group", synth, synth.n_per_group),
      GZ_COUNT("synth", "n_sentences", synth, synth.n_sentences),
      GZ_REAL("synth", "sample_rate_hz", synth, synth.sample_rate_hz),
      GZ_REAL("synth", "ou_theta", synth, synth.ou_theta),
      GZ_REAL("synth", "ou_sigma", synth, synth.ou_sigma),
      GZ_REAL("synth", "microsaccade_sd", synth, synth.microsaccade_sd),
      GZ_COUNT("synth", "min_words", synth, synth.min_words),
      GZ_COUNT("synth", "max_words", synth, synth.max_words),
      GZ_REAL("synth", "latency_median_ms", synth, synth.latency_median_ms),
      GZ_REAL("synth", "latency_sigma", synth, synth.latency_sigma),
      GZ_REAL("synth", "latency_min_ms", synth, synth.latency_min_ms),
      GZ_REAL("synth", "latency_max_ms", synth, synth.latency_max_ms),
      GZ_REAL("synth", "miss_rate", synth, synth.miss_rate),
      GZ_REAL("synth", "blink_rate_hz", synth, synth.blink_rate_hz),
      Field{"synth", "effect_channel", synth, [](const RunConfig& c) { return std::string(to_string(c.effect.channel)); },
            [](RunConfig& c, const std::string& s) { c.effect.channel = parse_direction(s); }},
      Field{"synth", "effect_condition", synth,
            [](const RunConfig& c) { return std::string(to_string(c.effect.condition)); },
            [](RunConfig& c, const std::string& s) { c.effect.condition = parse_effect_condition(s); }},
      GZ_REAL("synth", "window_start_ms", synth, effect.window_start_ms),
      GZ_REAL("synth", "window_end_ms", synth, effect.window_end_ms),
      GZ_REAL("synth", "s_window_shift_ms", synth, effect.s_window_shift_ms),
      Field{"synth", "amplitude", synth,
            [](const RunConfig& c) {
              return join(std::vector<double>(c.effect.amplitude.begin(), c.effect.amplitude.end()), num);
            },
            [](RunConfig& c, const std::string& s) {
              const auto items = split_list(s);
              if (items.size() != 3) bad("amplitude needs three values (C,D,S)");
              for (std::size_t g = 0; g < 3; ++g) c.effect.amplitude[g] = to_real(items[g]);
            }},
      Field{"synth", "endorsement", synth,
            [](const RunConfig& c) {
              std::vector<double> flat;
              for (const auto& g : c.effect.endorsement) flat.insert(flat.end(), g.begin(), g.end());
              return join(flat, num);
            },
            [](RunConfig& c, const std::string& s) {
              const auto items = split_list(s);
              if (items.size() != 6) bad("endorsement needs six values (C-neg,C-pos,D-neg,D-pos,S-neg,S-pos)");
              for (std::size_t i = 0; i < 6; ++i) c.effect.endorsement[i / 2][i % 2] = to_real(items[i]);
            }},
      GZ_REAL("synth", "aoi_coupling", synth, effect.aoi_coupling),
      GZ_REAL("synth", "amplitude_sd", synth, effect.amplitude_sd),
      GZ_REAL("synth", "latency_subject_sd", synth, effect.latency_subject_sd),
      GZ_REAL("synth", "amplitude_trial_sd", synth, effect.amplitude_trial_sd),

      Field{"data", "alignment", segment, [](const RunConfig& c) { return std::string(to_string(c.alignment)); },
            [](RunConfig& c, const std::string& s) { c.alignment = parse_alignment(s); }},
      GZ_REAL("data", "trial_fraction", segment, trial_fraction),
      GZ_COUNT("data", "set_size", sets, set_size),
      GZ_COUNT("data", "n_sets", sets, n_sets),
      Field{"data", "task", train, [](const RunConfig& c) { return std::string(to_string(c.task)); },
            [](RunConfig& c, const std::string& s) { c.task = parse_task(s); }},
      Field{"data", "ablation", train, [](const RunConfig& c) { return std::string(to_string(c.ablation)); },
            [](RunConfig& c, const std::string& s) { c.ablation = parse_ablation(s); }},

      GZ_COUNT("model", "filters", train, filters),
      GZ_COUNT("model", "hidden", train, hidden),
      GZ_BOOL("model", "share_directions", train, share_directions),

      GZ_COUNT("train", "batch_size", train, batch_size),
      GZ_REAL("train", "lr", train, lr),
      GZ_COUNT("train", "patience", train, patience),
      GZ_COUNT("train", "max_epochs", train, max_epochs),
      GZ_COUNT("train", "n_outer", train, n_outer),
      GZ_COUNT("train", "n_inner", train, n_inner),
      GZ_REAL("train", "val_fraction", train, val_fraction),
      GZ_BOOL("train", "permutation", train, permutation),

      GZ_COUNT("stats", "bootstrap_iters", eval, bootstrap_iters),

      GZ_COUNT("attribute", "ig_steps", attribute, ig_steps),
      GZ_COUNT("attribute", "ig_samples", attribute, ig_samples),
      GZ_REAL("attribute", "density_window_ms", attribute, density_window_ms),
      GZ_REAL("attribute", "density_zoom", attribute, density_zoom),

      Field{"sweep", "set_sizes", kNoStage, [](const RunConfig& c) { return join(c.sweep_set_sizes, cnt); },
            [](RunConfig& c, const std::string& s) {
              c.sweep_set_sizes.clear();
              for (const auto& i : split_list(s)) c.sweep_set_sizes.push_back(to_count(i));
            }},
      Field{"sweep", "n_sets", kNoStage, [](const RunConfig& c) { return join(c.sweep_n_sets, cnt); },
            [](RunConfig& c, const std::string& s) {
              c.sweep_n_sets.clear();
              for (const auto& i : split_list(s)) c.sweep_n_sets.push_back(to_count(i));
            }},
      Field{"sweep", "trial_fractions", kNoStage, [](const RunConfig& c) { return join(c.sweep_trial_fractions, num); },
            [](RunConfig& c, const std::string& s) {
              c.sweep_trial_fractions.clear();
              for (const auto& i : split_list(s)) c.sweep_trial_fractions.push_back(to_real(i));
            }},
  };
  return table;
}

#undef GZ_REAL
#undef GZ_COUNT
#undef GZ_BOOL
#undef GZ_TEXT

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError(field + ": " + rule);
}

}  // namespace

void RunConfig::validate() const {
  require(set_size >= 1, "data.set_size", "must be >= 1");
  require(n_sets >= 1, "data.n_sets", "must be >= 1");
  require(trial_fraction > 0.0 && trial_fraction <= 1.0, "data.trial_fraction", "must lie in (0, 1]");
  require(filters >= 1, "model.filters", "must be >= 1");
  require(hidden >= 1, "model.hidden", "must be >= 1");
  require(batch_size >= 1, "train.batch_size", "must be >= 1");
  require(lr > 0.0, "train.lr", "must be positive");
  require(patience >= 1, "train.patience", "must be >= 1");
  require(max_epochs >= 1, "train.max_epochs", "must be >= 1");
  require(n_outer >= 2, "train.n_outer", "must be >= 2");
  require(n_inner >= 1, "train.n_inner", "must be >= 1");
  require(val_fraction > 0.0 && val_fraction < 1.0, "train.val_fraction", "must lie in (0, 1)");
  require(bootstrap_iters >= 1, "stats.bootstrap_iters", "must be >= 1");
  require(ig_steps >= 1, "attribute.ig_steps", "must be >= 1");
  require(density_window_ms > 0.0, "attribute.density_window_ms", "must be positive");
  require(density_zoom >= 1.0, "attribute.density_zoom", "must be >= 1");
  require(!sweep_set_sizes.empty(), "sweep.set_sizes", "must not be empty");
  for (auto v : sweep_set_sizes) require(v >= 1, "sweep.set_sizes", "entries must be >= 1");
  require(!sweep_n_sets.empty(), "sweep.n_sets", "must not be empty");
  for (auto v : sweep_n_sets) require(v >= 1, "sweep.n_sets", "entries must be >= 1");
  require(!sweep_trial_fractions.empty(), "sweep.trial_fractions", "must not be empty");
  for (auto v : sweep_trial_fractions) require(v > 0.0 && v <= 1.0, "sweep.trial_fractions", "entries must lie in (0, 1]");
  try {
    synth.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
  try {
    effect.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
}

nnet::ModelConfig RunConfig::model_config() const {
  nnet::ModelConfig m;
  m.length = segment_length(alignment);
  m.filters = filters;
  m.hidden = hidden;
  m.share_directions = share_directions;
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.model = model_config();
  t.adam.lr = lr;
  t.batch_size = batch_size;
  t.patience = patience;
  t.max_epochs = max_epochs;
  return t;
}

ProtocolConfig RunConfig::protocol_config(std::size_t workers) const {
  ProtocolConfig p;
  p.n_outer = n_outer;
  p.n_inner = n_inner;
  p.val_fraction = val_fraction;
  p.train = train_config();
  p.seed = seed;
  p.workers = workers;
  return p;
}

std::string RunConfig::to_ini() const {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(*this) + "\n";
  }
  return out;
}

std::string RunConfig::stage_hash(Stage stage) const {
  std::string canon;
  for (const auto& f : fields()) {
    if (f.stage <= static_cast<int>(stage)) canon += f.section + "." + f.key + "=" + f.get(*this) + "\n";
  }
  return hex64(fnv1a(canon));
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(source + ": key '" + section + "' must sit inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const Field* field = nullptr;
      for (const auto& f : fields()) {
        if (f.section == section && f.key == key) field = &f;
      }
      if (!field) throw ConfigError(source + ": unknown field " + section + "." + key);
      try {
        field->set(cfg, std::string(trim(value.data())));
      } catch (const Error& e) {
        throw ConfigError(source + ": " + section + "." + key + ": " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IngestError&) {
    throw ConfigError("cannot read config file " + path);
  }
  return parse(text, path);
}

}  // namespace gazenet
