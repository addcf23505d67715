#include "gazenet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gazenet {

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table, const char* what) {
  s = trim(s);
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, Group>, 3> kGroupNames{
    {{"C", Group::C}, {"D", Group::D}, {"S", Group::S}}};
constexpr std::array<std::pair<std::string_view, Gender>, 3> kGenderNames{
    {{"F", Gender::F}, {"M", Gender::M}, {"other", Gender::Other}}};
constexpr std::array<std::pair<std::string_view, EventKind>, 3> kEventNames{
    {{"fixation", EventKind::Fixation}, {"saccade", EventKind::Saccade}, {"blink", EventKind::Blink}}};
constexpr std::array<std::pair<std::string_view, Presentation>, 2> kPresentationNames{
    {{"first", Presentation::First}, {"second", Presentation::Second}}};
constexpr std::array<std::pair<std::string_view, Sentiment>, 2> kSentimentNames{
    {{"negative", Sentiment::Negative}, {"positive_neutral", Sentiment::PositiveNeutral}}};
constexpr std::array<std::pair<std::string_view, Response>, 3> kResponseNames{
    {{"agree", Response::Agree}, {"disagree", Response::Disagree}, {"missed", Response::Missed}}};

template <class E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

struct CsvFile {
  std::string path;
  std::string text;
  std::vector<std::string_view> lines;

  explicit CsvFile(std::string p) : path(std::move(p)), text(read_file(path)) {
    std::string_view all(text);
    std::size_t start = 0;
    while (start < all.size()) {
      std::size_t nl = all.find('\n', start);
      if (nl == std::string_view::npos) nl = all.size();
      lines.push_back(all.substr(start, nl - start));
      start = nl + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  }

  // Validates the header and returns the data rows (1-based line numbers are index + 1).
  void expect_header(std::initializer_list<std::string_view> cols) const {
    if (lines.empty()) throw ParseError(path, 1, "missing header");
    auto fields = split_csv_line(lines[0]);
    std::size_t i = 0;
    bool ok = fields.size() == cols.size();
    for (auto c : cols) {
      if (!ok) break;
      ok = trim(fields[i++]) == c;
    }
    if (!ok) throw ParseError(path, 1, "unexpected header '" + std::string(lines[0]) + "'");
  }

  std::vector<std::string_view> row(std::size_t idx, std::size_t n_fields) const {
    auto fields = split_csv_line(lines[idx]);
    if (fields.size() != n_fields) {
      throw ParseError(path, idx + 1,
                       "expected " + std::to_string(n_fields) + " fields, got " + std::to_string(fields.size()));
    }
    return fields;
  }
};

template <class F>
auto with_line(const std::string& path, std::size_t line, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, line, e.what());
  }
}

std::optional<int> parse_optional_int(std::string_view s, const std::string& path, std::size_t line) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  return static_cast<int>(parse_int(s, path, line));
}

}  // namespace

std::string_view to_string(Group g) { return name_of(g, kGroupNames); }
std::string_view to_string(Gender g) { return name_of(g, kGenderNames); }
std::string_view to_string(EventKind k) { return name_of(k, kEventNames); }
std::string_view to_string(Presentation p) { return name_of(p, kPresentationNames); }
std::string_view to_string(Sentiment s) { return name_of(s, kSentimentNames); }
std::string_view to_string(Response r) { return name_of(r, kResponseNames); }
Group parse_group(std::string_view s) { return parse_enum(s, kGroupNames, "group"); }
Gender parse_gender(std::string_view s) { return parse_enum(s, kGenderNames, "gender"); }
EventKind parse_event_kind(std::string_view s) { return parse_enum(s, kEventNames, "event kind"); }
Presentation parse_presentation(std::string_view s) { return parse_enum(s, kPresentationNames, "presentation"); }
Sentiment parse_sentiment(std::string_view s) { return parse_enum(s, kSentimentNames, "sentiment"); }
Response parse_response(std::string_view s) { return parse_enum(s, kResponseNames, "response"); }

void ScreenGeometry::validate() const {
  auto inside = [](const Rect& r) {
    return r.x0 >= -1.0 && r.x1 <= 1.0 && r.y0 >= -1.0 && r.y1 <= 1.0 && r.x0 < r.x1 && r.y0 < r.y1;
  };
  if (!inside(agree_aoi) || !inside(disagree_aoi)) {
    throw ConfigError("AOI rectangles must be non-empty and lie within [-1,1]^2");
  }
  if (agree_aoi.intersects(disagree_aoi)) throw ConfigError("agree and disagree AOIs overlap");
  if (width_px <= 0 || height_px <= 0) throw ConfigError("screen size must be positive");
}

std::size_t ParticipantData::retained_count() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.excluded; }));
}

const ParticipantData* Cohort::find(std::string_view id) const {
  for (const auto& p : participants) {
    if (p.info.id == id) return &p;
  }
  return nullptr;
}

CohortPaths CohortPaths::under(const std::string& corpus_dir) {
  std::filesystem::path root(corpus_dir);
  return {(root / "roster.csv").string(), (root / "gaze").string(), (root / "trials").string()};
}

std::string CohortPaths::gaze_file(const std::string& id) const {
  return (std::filesystem::path(gaze_dir) / (id + ".csv")).string();
}
std::string CohortPaths::events_file(const std::string& id) const {
  return (std::filesystem::path(gaze_dir) / (id + ".events.csv")).string();
}
std::string CohortPaths::trials_file(const std::string& id) const {
  return (std::filesystem::path(trials_dir) / (id + ".csv")).string();
}

std::optional<std::string> check_group_scores(const Participant& p) {
  if (p.phq9 && (*p.phq9 < 0 || *p.phq9 > 27)) return "phq9 out of range 0-27";
  if (p.gad7 && (*p.gad7 < 0 || *p.gad7 > 21)) return "gad7 out of range 0-21";
  if (p.sis && *p.sis < 0) return "sis negative";
  if (!p.phq9) return std::nullopt;
  bool ok = true;
  switch (p.group) {
    case Group::C:
      ok = *p.phq9 < 5;
      break;
    case Group::D:
      ok = *p.phq9 > 9 && (!p.sis || *p.sis <= 16);
      break;
    case Group::S:
      ok = *p.phq9 > 9 && (!p.sis || *p.sis > 16);
      break;
  }
  if (!ok) return "group/score mismatch";
  return std::nullopt;
}

void validate_recording(const GazeRecording& rec) {
  const auto& s = rec.samples;
  if (!(rec.sample_rate_hz > 0.0)) {
    throw IngestError(rec.participant_id + ": sample rate must be positive");
  }
  const double dt = 1000.0 / rec.sample_rate_hz;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].t_ms)) {
      throw IngestError(rec.participant_id + ": non-finite timestamp at sample " + std::to_string(i));
    }
    if (i == 0) continue;
    double step = s[i].t_ms - s[i - 1].t_ms;
    if (!(step > 0.0)) {
      throw IngestError(rec.participant_id + ": timestamps not strictly increasing at sample " + std::to_string(i));
    }
    if (std::abs(step - dt) > 0.01 * dt) {
      throw IngestError(rec.participant_id + ": sample spacing " + format_double(step) +
                        " ms inconsistent with rate at sample " + std::to_string(i));
    }
  }
  if (s.empty()) return;
  const double t0 = s.front().t_ms;
  const double t1 = s.back().t_ms;
  for (std::size_t i = 0; i < rec.events.size(); ++i) {
    const auto& e = rec.events[i];
    if (!(e.start_ms <= e.end_ms) || e.start_ms < t0 || e.end_ms > t1) {
      throw IngestError(rec.participant_id + ": event " + std::to_string(i) + " outside recording bounds");
    }
  }
}

std::optional<std::string> check_trial(const TrialRecord& t) {
  if (!std::isfinite(t.final_word_onset_ms)) return "non-finite final word onset";
  const bool has_rt = t.response_time_ms.has_value();
  if ((t.response == Response::Missed) == has_rt) return "response/response_time inconsistent";
  if (has_rt && *t.response_time_ms > t.prompt_onset_ms() + kResponseLimitMs) {
    return "response after the 2 s prompt limit";
  }
  if (has_rt && *t.response_time_ms <= t.final_word_onset_ms) return "response before final-word onset";
  return std::nullopt;
}

std::vector<Participant> read_roster(const std::string& path) {
  CsvFile csv(path);
  csv.expect_header({"id", "group", "gender", "phq9", "sis", "gad7"});
  std::vector<Participant> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < csv.lines.size(); ++i) {
    if (trim(csv.lines[i]).empty()) continue;
    auto f = csv.row(i, 6);
    Participant p;
    p.id = std::string(trim(f[0]));
    if (p.id.empty()) throw ParseError(path, i + 1, "empty participant id");
    if (!seen.insert(p.id).second) throw ParseError(path, i + 1, "duplicate participant id " + p.id);
    with_line(path, i + 1, [&] {
      p.group = parse_group(f[1]);
      p.gender = parse_gender(f[2]);
      return 0;
    });
    p.phq9 = parse_optional_int(f[3], path, i + 1);
    p.sis = parse_optional_int(f[4], path, i + 1);
    p.gad7 = parse_optional_int(f[5], path, i + 1);
    out.push_back(std::move(p));
  }
  return out;
}

GazeRecording read_gaze(const std::string& samples_path, const std::string& events_path,
                        const std::string& participant_id) {
  GazeRecording rec;
  rec.participant_id = participant_id;
  {
    CsvFile csv(samples_path);
    csv.expect_header({"t_ms", "x_px", "y_px", "valid"});
    rec.samples.reserve(csv.lines.size());
    for (std::size_t i = 1; i < csv.lines.size(); ++i) {
      auto f = csv.row(i, 4);
      GazeSample s;
      s.t_ms = parse_double(f[0], samples_path, i + 1);
      s.x_px = parse_double(f[1], samples_path, i + 1);
      s.y_px = parse_double(f[2], samples_path, i + 1);
      auto v = parse_int(f[3], samples_path, i + 1);
      if (v != 0 && v != 1) throw ParseError(samples_path, i + 1, "valid must be 0 or 1");
      s.valid = v == 1;
      rec.samples.push_back(s);
    }
  }
  if (rec.samples.size() >= 2) {
    // Median spacing defines the nominal rate; validate_recording checks every step.
    std::vector<double> steps;
    steps.reserve(rec.samples.size() - 1);
    for (std::size_t i = 1; i < rec.samples.size(); ++i) steps.push_back(rec.samples[i].t_ms - rec.samples[i - 1].t_ms);
    std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2), steps.end());
    double med = steps[steps.size() / 2];
    if (med > 0.0) rec.sample_rate_hz = std::round(1000.0 / med * 1000.0) / 1000.0;
  }
  if (std::filesystem::exists(events_path)) {
    CsvFile csv(events_path);
    csv.expect_header({"kind", "start_ms", "end_ms"});
    for (std::size_t i = 1; i < csv.lines.size(); ++i) {
      auto f = csv.row(i, 3);
      GazeEvent e;
      e.kind = with_line(events_path, i + 1, [&] { return parse_event_kind(f[0]); });
      e.start_ms = parse_double(f[1], events_path, i + 1);
      e.end_ms = parse_double(f[2], events_path, i + 1);
      rec.events.push_back(e);
    }
  }
  return rec;
}

std::vector<TrialRecord> read_trials(const std::string& path) {
  CsvFile csv(path);
  csv.expect_header({"trial_id", "sentence_id", "presentation", "sentiment", "final_word_onset_ms", "response_time_ms",
                     "response"});
  std::vector<TrialRecord> out;
  for (std::size_t i = 1; i < csv.lines.size(); ++i) {
    auto f = csv.row(i, 7);
    TrialRecord t;
    t.trial_id = std::string(trim(f[0]));
    t.sentence_id = std::string(trim(f[1]));
    with_line(path, i + 1, [&] {
      t.presentation = parse_presentation(f[2]);
      t.sentiment = parse_sentiment(f[3]);
      t.response = parse_response(f[6]);
      return 0;
    });
    t.final_word_onset_ms = parse_double(f[4], path, i + 1);
    if (!trim(f[5]).empty()) t.response_time_ms = parse_double(f[5], path, i + 1);
    out.push_back(std::move(t));
  }
  return out;
}

void write_roster(const std::string& path, const std::vector<Participant>& roster) {
  std::string out = "id,group,gender,phq9,sis,gad7\n";
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& p : roster) {
    out += p.id + "," + std::string(to_string(p.group)) + "," + std::string(to_string(p.gender)) + "," + opt(p.phq9) +
           "," + opt(p.sis) + "," + opt(p.gad7) + "\n";
  }
  write_file(path, out);
}

void write_gaze(const std::string& samples_path, const std::string& events_path, const GazeRecording& rec) {
  std::string out;
  out.reserve(rec.samples.size() * 32 + 32);
  out += "t_ms,x_px,y_px,valid\n";
  for (const auto& s : rec.samples) {
    out += format_double(s.t_ms);
    out += ',';
    out += format_double(s.x_px);
    out += ',';
    out += format_double(s.y_px);
    out += s.valid ? ",1\n" : ",0\n";
  }
  write_file(samples_path, out);
  std::string ev = "kind,start_ms,end_ms\n";
  for (const auto& e : rec.events) {
    ev += std::string(to_string(e.kind)) + "," + format_double(e.start_ms) + "," + format_double(e.end_ms) + "\n";
  }
  write_file(events_path, ev);
}

void write_trials(const std::string& path, const std::vector<TrialRecord>& trials) {
  std::string out = "trial_id,sentence_id,presentation,sentiment,final_word_onset_ms,response_time_ms,response\n";
  for (const auto& t : trials) {
    out += t.trial_id + "," + t.sentence_id + "," + std::string(to_string(t.presentation)) + "," +
           std::string(to_string(t.sentiment)) + "," + format_double(t.final_word_onset_ms) + "," +
           (t.response_time_ms ? format_double(*t.response_time_ms) : std::string()) + "," +
           std::string(to_string(t.response)) + "\n";
  }
  write_file(path, out);
}

void write_cohort(const Cohort& cohort, const CohortPaths& paths) {
  std::vector<Participant> roster;
  for (const auto& p : cohort.participants) {
    roster.push_back(p.info);
    write_gaze(paths.gaze_file(p.info.id), paths.events_file(p.info.id), p.gaze);
    write_trials(paths.trials_file(p.info.id), p.trials);
  }
  write_roster(paths.roster, roster);
}

Cohort load_cohort(const std::string& roster_path, const std::string& gaze_dir, const std::string& trials_dir) {
  return load_cohort(CohortPaths{roster_path, gaze_dir, trials_dir});
}

Cohort load_cohort(const CohortPaths& paths) {
  if (!std::filesystem::exists(paths.roster)) throw IngestError("roster not found: " + paths.roster);
  Cohort cohort;
  for (auto& p : read_roster(paths.roster)) {
    if (auto issue = check_group_scores(p)) {
      cohort.issues.push_back({p.id, *issue});
      continue;
    }
    const auto gaze_path = paths.gaze_file(p.id);
    const auto trials_path = paths.trials_file(p.id);
    if (!std::filesystem::exists(gaze_path)) throw IngestError("participant " + p.id + ": missing gaze file " + gaze_path);
    if (!std::filesystem::exists(trials_path)) {
      throw IngestError("participant " + p.id + ": missing trial file " + trials_path);
    }
    ParticipantData data;
    data.gaze = read_gaze(gaze_path, paths.events_file(p.id), p.id);
    validate_recording(data.gaze);
    data.trials = read_trials(trials_path);
    for (auto& t : data.trials) {
      if (auto issue = check_trial(t)) {
        t.excluded = true;
        t.exclusion_reason = *issue;
        cohort.issues.push_back({p.id, "trial " + t.trial_id + ": " + *issue});
      }
    }
    data.info = std::move(p);
    cohort.participants.push_back(std::move(data));
  }
  return cohort;
}

Cohort exclude_trials(const Cohort& cohort, const std::set<std::string>& excluded_sentences) {
  std::set<std::string> known;
  for (const auto& p : cohort.participants) {
    for (const auto& t : p.trials) known.insert(t.sentence_id);
  }
  for (const auto& s : excluded_sentences) {
    if (!known.count(s)) throw ConfigError("unknown sentence id '" + s + "' in exclusion list");
  }
  Cohort out = cohort;
  for (auto& p : out.participants) {
    const auto& samples = p.gaze.samples;
    const double t_first = samples.empty() ? 0.0 : samples.front().t_ms;
    const double t_last = samples.empty() ? 0.0 : samples.back().t_ms;
    for (auto& t : p.trials) {
      if (t.excluded) continue;
      if (excluded_sentences.count(t.sentence_id)) {
        t.excluded = true;
        t.exclusion_reason = "excluded sentence";
      } else if (t.response == Response::Missed || !t.response_time_ms) {
        t.excluded = true;
        t.exclusion_reason = "missed response";
      } else if (samples.empty() || t.final_word_onset_ms - 500.0 < t_first || *t.response_time_ms > t_last) {
        t.excluded = true;
        t.exclusion_reason = "gaze does not cover trial";
      }
    }
  }
  return out;
}

SummaryReport cohort_summary(const Cohort& cohort) {
  SummaryReport r;
  for (auto g : kGroups) r.group_counts[std::string(to_string(g))] = 0;
  for (auto g : {Gender::F, Gender::M, Gender::Other}) r.gender_counts[std::string(to_string(g))] = 0;
  double rt_sum = 0.0;
  std::size_t rt_n = 0;
  for (const auto& p : cohort.participants) {
    ++r.participants;
    ++r.group_counts[std::string(to_string(p.info.group))];
    ++r.gender_counts[std::string(to_string(p.info.gender))];
    for (const auto& t : p.trials) {
      ++r.trials_total;
      if (!t.excluded) ++r.trials_retained;
      if (t.response == Response::Missed) ++r.trials_missed;
      if (t.response_time_ms) {
        rt_sum += *t.response_time_ms - t.final_word_onset_ms;
        ++rt_n;
      }
    }
  }
  r.mean_response_latency_ms = rt_n ? rt_sum / static_cast<double>(rt_n) : 0.0;
  r.issues = cohort.issues.size();
  return r;
}

std::string SummaryReport::to_json() const {
  nlohmann::json j;
  j["participants"] = participants;
  j["group_counts"] = group_counts;
  j["gender_counts"] = gender_counts;
  j["trials_total"] = trials_total;
  j["trials_retained"] = trials_retained;
  j["trials_missed"] = trials_missed;
  j["mean_response_latency_ms"] = mean_response_latency_ms;
  j["issues"] = issues;
  return j.dump(2);
}

}  // namespace gazenet
