#include "gazenet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace gazenet {

std::string_view to_string(Direction d) { return d == Direction::X ? "x" : "y"; }

std::string_view to_string(EffectCondition c) {
  switch (c) {
    case EffectCondition::Negative: return "negative";
    case EffectCondition::PositiveNeutral: return "positive_neutral";
    case EffectCondition::Both: return "both";
  }
  return "?";
}

Direction parse_direction(std::string_view s) {
  if (s == "x") return Direction::X;
  if (s == "y") return Direction::Y;
  throw ConfigError("unknown direction '" + std::string(s) + "'");
}

EffectCondition parse_effect_condition(std::string_view s) {
  if (s == "negative") return EffectCondition::Negative;
  if (s == "positive_neutral" || s == "positive") return EffectCondition::PositiveNeutral;
  if (s == "both") return EffectCondition::Both;
  throw ConfigError("unknown effect condition '" + std::string(s) + "'");
}

void EffectSpec::validate() const {
  for (double a : amplitude) {
    if (!std::isfinite(a)) throw ConfigError("effect amplitude must be finite");
  }
  for (const auto& row : endorsement) {
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("endorsement probability outside [0,1]");
    }
  }
  if (!(aoi_coupling >= 0.0 && aoi_coupling <= 1.0)) throw ConfigError("aoi_coupling outside [0,1]");
  if (!(window_end_ms > window_start_ms)) throw ConfigError("effect window is empty");
  if (!std::isfinite(s_window_shift_ms)) throw ConfigError("s_window_shift_ms must be finite");
  if (!(amplitude_sd >= 0.0) || !(latency_subject_sd >= 0.0) || !(amplitude_trial_sd >= 0.0)) throw ConfigError("spreads must be non-negative");
}

EffectSpec EffectSpec::null_spec() {
  EffectSpec s;
  s.amplitude = {0.0, 0.0, 0.0};
  s.endorsement = {{{0.5, 0.6}, {0.5, 0.6}, {0.5, 0.6}}};
  s.amplitude_sd = 0.0;
  s.amplitude_trial_sd = 0.0;
  return s;
}

void SynthConfig::validate() const {
  if (n_per_group == 0) throw ConfigError("n_per_group must be positive");
  if (n_sentences == 0 || n_sentences % 2 != 0) throw ConfigError("n_sentences must be even and positive");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be positive");
  if (min_words < 2 || max_words < min_words) throw ConfigError("word count range invalid");
  if (!(latency_min_ms > 0.0 && latency_max_ms >= latency_min_ms)) throw ConfigError("latency clip range invalid");
  if (latency_max_ms > kFinalWordMs + kPromptGapMs + kResponseLimitMs) {
    throw ConfigError("latency_max_ms exceeds the response deadline");
  }
  if (!(miss_rate >= 0.0 && miss_rate < 1.0)) throw ConfigError("miss_rate outside [0,1)");
  if (!(blink_rate_hz >= 0.0) || !(blink_max_ms >= blink_min_ms)) throw ConfigError("blink parameters invalid");
}

namespace {

struct Target {
  double t_ms;
  double x, y;
};

struct Drift {
  double start_ms, peak_ms, end_ms;  // ramps up to the press, then back down
  double amplitude;
};

std::string participant_id(Group g, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", std::string(to_string(g)).c_str(), i + 1);
  return buf;
}

Participant make_participant(Group g, std::size_t i, Gender gender, bool scores, Rng& rng) {
  Participant p;
  p.id = participant_id(g, i);
  p.group = g;
  p.gender = gender;
  if (scores) {
    auto draw = [&rng](int lo, int hi) { return lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1))); };
    switch (g) {
      case Group::C:
        p.phq9 = draw(0, 4);
        p.sis = draw(0, 12);
        break;
      case Group::D:
        p.phq9 = draw(10, 27);
        p.sis = draw(0, 16);
        break;
      case Group::S:
        p.phq9 = draw(10, 27);
        p.sis = draw(17, 40);
        break;
    }
    p.gad7 = draw(0, 21);
  }
  return p;
}

double round_px(double v) { return std::round(v * 100.0) / 100.0; }

ParticipantData simulate_participant(const Participant& info, const SynthConfig& cfg, const EffectSpec& spec,
                                     std::uint64_t seed) {
  Rng rng(derive_seed(seed, {"synth", info.id}));
  ParticipantData out;
  out.info = info;

  const double subject_amp = spec.amplitude_of(info.group) + spec.amplitude_sd * rng.normal();
  const double subject_median = cfg.latency_median_ms * std::exp(spec.latency_subject_sd * rng.normal());
  const bool s_group = info.group == Group::S;
  const double win_start = spec.window_start_ms + (s_group ? spec.s_window_shift_ms : 0.0);
  const double win_end = spec.window_end_ms;

  std::vector<std::size_t> order;
  for (int block = 0; block < 2; ++block) {
    std::vector<std::size_t> ids(cfg.n_sentences);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    rng.shuffle(ids);
    order.insert(order.end(), ids.begin(), ids.end());
  }

  std::vector<Target> targets;
  std::vector<Drift> drifts;
  std::vector<GazeEvent> events;
  targets.push_back({0.0, 0.0, 0.0});
  auto micro = [&](double t) { targets.push_back({t, cfg.microsaccade_sd * rng.normal(), cfg.microsaccade_sd * rng.normal()}); };

  double t = 1000.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t sid = order[k];
    TrialRecord tr;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_t%03zu", k + 1);
    tr.trial_id = info.id + buf;
    std::snprintf(buf, sizeof(buf), "s%03zu", sid + 1);
    tr.sentence_id = buf;
    tr.presentation = k < cfg.n_sentences ? Presentation::First : Presentation::Second;
    // Sentences come in pairs that differ only in the final word.
    tr.sentiment = sid % 2 == 0 ? Sentiment::Negative : Sentiment::PositiveNeutral;

    const std::size_t words = cfg.min_words + rng.index(cfg.max_words - cfg.min_words + 1);
    micro(t);
    double w = t + cfg.fixation_cross_ms;
    for (std::size_t i = 0; i + 1 < words; ++i) {
      micro(w);
      w += cfg.word_ms + cfg.inter_word_ms;
    }
    micro(w);
    tr.final_word_onset_ms = w;
    const double prompt = tr.prompt_onset_ms();

    double end;
    if (rng.bernoulli(cfg.miss_rate)) {
      tr.response = Response::Missed;
      end = prompt + kResponseLimitMs;
    } else {
      tr.response = rng.bernoulli(spec.agree_prob(info.group, tr.sentiment)) ? Response::Agree : Response::Disagree;
      double lat = subject_median * std::exp(cfg.latency_sigma * rng.normal());
      lat = std::clamp(lat, cfg.latency_min_ms, cfg.latency_max_ms);
      const double press = std::round((w + lat) * 10.0) / 10.0;
      tr.response_time_ms = press;
      end = std::max(press, prompt);

      if (rng.bernoulli(spec.aoi_coupling)) {
        const Rect& aoi = tr.response == Response::Agree ? ScreenGeometry{}.agree_aoi : ScreenGeometry{}.disagree_aoi;
        const double cx = 0.5 * (aoi.x0 + aoi.x1), cy = 0.5 * (aoi.y0 + aoi.y1);
        const double lead = rng.uniform(150.0, 400.0);
        const double go = std::max(press - lead, w);
        targets.push_back({go, cx + 0.02 * rng.normal(), cy + 0.02 * rng.normal()});
        targets.push_back({press + 150.0, 0.0, 0.0});
        events.push_back({EventKind::Saccade, go, go + 30.0});
        events.push_back({EventKind::Saccade, press + 150.0, press + 180.0});
        end = std::max(end, press + 180.0);
      }

      const bool in_condition = spec.condition == EffectCondition::Both ||
                                (spec.condition == EffectCondition::Negative) == (tr.sentiment == Sentiment::Negative);
      if (in_condition && subject_amp != 0.0) {
        const double amp = spec.amplitude_trial_sd > 0.0 ? subject_amp + spec.amplitude_trial_sd * rng.normal() : subject_amp;
        drifts.push_back({press + win_start, press + win_end, press + win_end + 200.0, amp});
      }
    }
    out.trials.push_back(tr);
    t = end + 300.0 + cfg.inter_trial_ms;
  }
  const double duration = t + 1000.0;

  // Blinks: Poisson arrivals over the whole session.
  std::vector<std::pair<double, double>> blinks;
  if (cfg.blink_rate_hz > 0.0) {
    double b = 0.0;
    for (;;) {
      b += -std::log(1.0 - rng.uniform()) * 1000.0 / cfg.blink_rate_hz;
      const double len = rng.uniform(cfg.blink_min_ms, cfg.blink_max_ms);
      if (b + len >= duration - 10.0) break;
      const double b0 = std::round(b), b1 = std::round(b + len);
      blinks.emplace_back(b0, b1);
      events.push_back({EventKind::Blink, b0, b1});
      b += len;
    }
  }
  std::sort(events.begin(), events.end(), [](const GazeEvent& a, const GazeEvent& b) { return a.start_ms < b.start_ms; });
  std::stable_sort(targets.begin(), targets.end(), [](const Target& a, const Target& b) { return a.t_ms < b.t_ms; });

  auto& rec = out.gaze;
  rec.participant_id = info.id;
  rec.sample_rate_hz = cfg.sample_rate_hz;
  rec.events = std::move(events);
  const double dt_ms = 1000.0 / cfg.sample_rate_hz;
  const std::size_t n = static_cast<std::size_t>(duration / dt_ms);
  rec.samples.resize(n);
  const double decay = std::exp(-cfg.ou_theta * dt_ms / 1000.0);
  const double step_sd = cfg.ou_sigma * std::sqrt((1.0 - decay * decay) / (2.0 * cfg.ou_theta));
  double ox = 0.0, oy = 0.0;
  std::size_t ti = 0, bi = 0, di = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ts = static_cast<double>(i) * dt_ms;
    ox = ox * decay + step_sd * rng.normal();
    oy = oy * decay + step_sd * rng.normal();
    while (ti + 1 < targets.size() && targets[ti + 1].t_ms <= ts) ++ti;
    double gx = targets[ti].x + ox;
    double gy = targets[ti].y + oy;

    while (di < drifts.size() && drifts[di].end_ms <= ts) ++di;
    for (std::size_t j = di; j < drifts.size() && drifts[j].start_ms <= ts; ++j) {
      const Drift& d = drifts[j];
      if (ts >= d.end_ms) continue;
      const double v = ts < d.peak_ms ? (ts - d.start_ms) / (d.peak_ms - d.start_ms)
                                      : (d.end_ms - ts) / (d.end_ms - d.peak_ms);
      (spec.channel == Direction::X ? gx : gy) += d.amplitude * v;
    }

    GazeSample& s = rec.samples[i];
    s.t_ms = ts;
    while (bi < blinks.size() && blinks[bi].second < ts) ++bi;
    if (bi < blinks.size() && ts >= blinks[bi].first && ts <= blinks[bi].second) {
      s.valid = false;
      s.x_px = 0.0;
      s.y_px = 0.0;
    } else {
      s.x_px = round_px(0.5 * kScreenWidthPx * (1.0 + gx));
      s.y_px = round_px(0.5 * kScreenHeightPx * (1.0 + gy));
    }
  }
  return out;
}

}  // namespace

Cohort synthesize_cohort(const SynthConfig& cfg, const EffectSpec& spec, std::uint64_t seed) {
  cfg.validate();
  spec.validate();
  Cohort cohort;
  Rng roster_rng(derive_seed(seed, {"synth", "roster"}));
  for (Group g : kGroups) {
    std::vector<Gender> genders(cfg.n_per_group, Gender::M);
    for (std::size_t i = 0; i < (cfg.n_per_group + 1) / 2; ++i) genders[i] = Gender::F;
    roster_rng.shuffle(genders);
    for (std::size_t i = 0; i < cfg.n_per_group; ++i) {
      Participant p = make_participant(g, i, genders[i], cfg.questionnaire_scores, roster_rng);
      cohort.participants.push_back(simulate_participant(p, cfg, spec, seed));
    }
  }
  return cohort;
}

Cohort generate_cohort(const std::string& corpus_dir, const SynthConfig& cfg, const EffectSpec& spec,
                       std::uint64_t seed) {
  Cohort cohort = synthesize_cohort(cfg, spec, seed);
  write_cohort(cohort, CohortPaths::under(corpus_dir));
  write_file(corpus_dir + "/provenance.json", describe_cohort(seed, cfg, spec) + "\n");
  return cohort;
}

std::string describe_cohort(std::uint64_t seed, const SynthConfig& cfg, const EffectSpec& spec) {
  nlohmann::ordered_json j;
  j["generator"] = "gazenet-synth";
  j["seed"] = seed;
  auto& c = j["config"];
  c["n_per_group"] = cfg.n_per_group;
  c["n_sentences"] = cfg.n_sentences;
  c["sample_rate_hz"] = cfg.sample_rate_hz;
  c["ou_theta"] = cfg.ou_theta;
  c["ou_sigma"] = cfg.ou_sigma;
  c["microsaccade_sd"] = cfg.microsaccade_sd;
  c["min_words"] = cfg.min_words;
  c["max_words"] = cfg.max_words;
  c["fixation_cross_ms"] = cfg.fixation_cross_ms;
  c["word_ms"] = cfg.word_ms;
  c["inter_word_ms"] = cfg.inter_word_ms;
  c["inter_trial_ms"] = cfg.inter_trial_ms;
  c["latency_median_ms"] = cfg.latency_median_ms;
  c["latency_sigma"] = cfg.latency_sigma;
  c["latency_min_ms"] = cfg.latency_min_ms;
  c["latency_max_ms"] = cfg.latency_max_ms;
  c["miss_rate"] = cfg.miss_rate;
  c["blink_rate_hz"] = cfg.blink_rate_hz;
  c["blink_min_ms"] = cfg.blink_min_ms;
  c["blink_max_ms"] = cfg.blink_max_ms;
  c["questionnaire_scores"] = cfg.questionnaire_scores;
  auto& e = j["effect"];
  e["channel"] = to_string(spec.channel);
  e["condition"] = to_string(spec.condition);
  e["window_ms"] = {spec.window_start_ms, spec.window_end_ms};
  e["s_window_shift_ms"] = spec.s_window_shift_ms;
  for (Group g : kGroups) {
    const std::string name(to_string(g));
    e["amplitude"][name] = spec.amplitude_of(g);
    e["endorsement"][name]["negative"] = spec.agree_prob(g, Sentiment::Negative);
    e["endorsement"][name]["positive_neutral"] = spec.agree_prob(g, Sentiment::PositiveNeutral);
  }
  e["aoi_coupling"] = spec.aoi_coupling;
  e["amplitude_sd"] = spec.amplitude_sd;
  e["latency_subject_sd"] = spec.latency_subject_sd;
  e["amplitude_trial_sd"] = spec.amplitude_trial_sd;
  j["groups"] = {{"C", cfg.n_per_group}, {"D", cfg.n_per_group}, {"S", cfg.n_per_group}};
  return j.dump(2);
}

void parse_description(const std::string& text, std::uint64_t& seed, SynthConfig& cfg, EffectSpec& spec) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    cfg.n_per_group = c.at("n_per_group");
    cfg.n_sentences = c.at("n_sentences");
    cfg.sample_rate_hz = c.at("sample_rate_hz");
    cfg.ou_theta = c.at("ou_theta");
    cfg.ou_sigma = c.at("ou_sigma");
    cfg.microsaccade_sd = c.at("microsaccade_sd");
    cfg.min_words = c.at("min_words");
    cfg.max_words = c.at("max_words");
    cfg.fixation_cross_ms = c.at("fixation_cross_ms");
    cfg.word_ms = c.at("word_ms");
    cfg.inter_word_ms = c.at("inter_word_ms");
    cfg.inter_trial_ms = c.at("inter_trial_ms");
    cfg.latency_median_ms = c.at("latency_median_ms");
    cfg.latency_sigma = c.at("latency_sigma");
    cfg.latency_min_ms = c.at("latency_min_ms");
    cfg.latency_max_ms = c.at("latency_max_ms");
    cfg.miss_rate = c.at("miss_rate");
    cfg.blink_rate_hz = c.at("blink_rate_hz");
    cfg.blink_min_ms = c.at("blink_min_ms");
    cfg.blink_max_ms = c.at("blink_max_ms");
    cfg.questionnaire_scores = c.at("questionnaire_scores");
    const auto& e = j.at("effect");
    spec.channel = parse_direction(e.at("channel").get<std::string>());
    spec.condition = parse_effect_condition(e.at("condition").get<std::string>());
    spec.window_start_ms = e.at("window_ms").at(0);
    spec.window_end_ms = e.at("window_ms").at(1);
    spec.s_window_shift_ms = e.at("s_window_shift_ms");
    for (Group g : kGroups) {
      const std::string name(to_string(g));
      const auto gi = static_cast<std::size_t>(g);
      spec.amplitude[gi] = e.at("amplitude").at(name);
      spec.endorsement[gi][0] = e.at("endorsement").at(name).at("negative");
      spec.endorsement[gi][1] = e.at("endorsement").at(name).at("positive_neutral");
    }
    spec.aoi_coupling = e.at("aoi_coupling");
    spec.amplitude_sd = e.at("amplitude_sd");
    spec.latency_subject_sd = e.at("latency_subject_sd");
    spec.amplitude_trial_sd = e.value("amplitude_trial_sd", 0.0);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("invalid cohort description: ") + ex.what());
  }
}

}  // namespace gazenet
