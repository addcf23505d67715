#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gazenet/common.hpp"

namespace gazenet {

enum class Group { C, D, S };
enum class Gender { F, M, Other };
enum class EventKind { Fixation, Saccade, Blink };
enum class Presentation { First, Second };
enum class Sentiment { Negative, PositiveNeutral };
enum class Response { Agree, Disagree, Missed };

inline constexpr std::array<Group, 3> kGroups{Group::C, Group::D, Group::S};
inline constexpr std::array<Sentiment, 2> kSentiments{Sentiment::Negative, Sentiment::PositiveNeutral};

std::string_view to_string(Group g);
std::string_view to_string(Gender g);
std::string_view to_string(EventKind k);
std::string_view to_string(Presentation p);
std::string_view to_string(Sentiment s);
std::string_view to_string(Response r);
Group parse_group(std::string_view s);
Gender parse_gender(std::string_view s);
EventKind parse_event_kind(std::string_view s);
Presentation parse_presentation(std::string_view s);
Sentiment parse_sentiment(std::string_view s);
Response parse_response(std::string_view s);

// Final word is shown for 600 ms, followed by a 300 ms blank before the
// agree/disagree prompt; the prompt stays up for at most 2 s.
inline constexpr double kFinalWordMs = 600.0;
inline constexpr double kPromptGapMs = 300.0;
inline constexpr double kResponseLimitMs = 2000.0;
inline constexpr double kScreenWidthPx = 1920.0;
inline constexpr double kScreenHeightPx = 1080.0;

struct Participant {
  std::string id;
  Group group = Group::C;
  Gender gender = Gender::F;
  std::optional<int> phq9;
  std::optional<int> sis;
  std::optional<int> gad7;
};

struct GazeSample {
  double t_ms = 0.0;
  double x_px = 0.0;
  double y_px = 0.0;
  bool valid = true;
};

struct GazeEvent {
  EventKind kind = EventKind::Fixation;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

struct GazeRecording {
  std::string participant_id;
  double sample_rate_hz = 500.0;
  std::vector<GazeSample> samples;
  std::vector<GazeEvent> events;
};

struct TrialRecord {
  std::string trial_id;
  std::string sentence_id;
  Presentation presentation = Presentation::First;
  Sentiment sentiment = Sentiment::Negative;
  double final_word_onset_ms = 0.0;
  std::optional<double> response_time_ms;  // absolute, same clock as gaze t_ms
  Response response = Response::Missed;
  bool excluded = false;
  std::string exclusion_reason;

  double prompt_onset_ms() const { return final_word_onset_ms + kFinalWordMs + kPromptGapMs; }
};

// Axis-aligned rectangle in normalized screen coordinates ([-1,1]^2).
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool intersects(const Rect& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

struct ScreenGeometry {
  double width_px = kScreenWidthPx;
  double height_px = kScreenHeightPx;
  // Prompt positions are not fixed by the task; defaults place the two
  // buttons left (agree) and right (disagree) of the screen center.
  Rect agree_aoi{-0.80, -0.15, -0.40, 0.15};
  Rect disagree_aoi{0.40, -0.15, 0.80, 0.15};

  // Throws ConfigError when an AOI leaves [-1,1]^2 or the AOIs overlap.
  void validate() const;
};

struct ParticipantData {
  Participant info;
  GazeRecording gaze;
  std::vector<TrialRecord> trials;

  std::size_t retained_count() const;
};

struct ValidationIssue {
  std::string participant_id;
  std::string message;
};

// Immutable after loading; safe to share read-only across threads.
struct Cohort {
  std::vector<ParticipantData> participants;
  std::vector<ValidationIssue> issues;

  const ParticipantData* find(std::string_view id) const;
};

struct CohortPaths {
  std::string roster;
  std::string gaze_dir;
  std::string trials_dir;

  // Conventional layout under one corpus directory:
  //   roster.csv, gaze/<id>.csv, gaze/<id>.events.csv, trials/<id>.csv
  static CohortPaths under(const std::string& corpus_dir);
  std::string gaze_file(const std::string& id) const;
  std::string events_file(const std::string& id) const;
  std::string trials_file(const std::string& id) const;
};

// Questionnaire-threshold check; empty optional when consistent or scores absent.
std::optional<std::string> check_group_scores(const Participant& p);
// Structural checks on a gaze recording; throws IngestError naming the first
// offending sample index.
void validate_recording(const GazeRecording& rec);
// Trial timing invariants; empty optional when consistent.
std::optional<std::string> check_trial(const TrialRecord& t);

std::vector<Participant> read_roster(const std::string& path);
GazeRecording read_gaze(const std::string& samples_path, const std::string& events_path,
                        const std::string& participant_id);
std::vector<TrialRecord> read_trials(const std::string& path);

void write_roster(const std::string& path, const std::vector<Participant>& roster);
void write_gaze(const std::string& samples_path, const std::string& events_path, const GazeRecording& rec);
void write_trials(const std::string& path, const std::vector<TrialRecord>& trials);
void write_cohort(const Cohort& cohort, const CohortPaths& paths);

// Loads roster, gaze and trials. Participants whose roster row fails the
// group/score thresholds are recorded in Cohort::issues and left out; trials
// violating timing invariants are kept but flagged excluded with the reason.
Cohort load_cohort(const std::string& roster_path, const std::string& gaze_dir, const std::string& trials_dir);
Cohort load_cohort(const CohortPaths& paths);

// Flags trials of the given sentences, missed trials, and trials whose gaze
// coverage does not span [final_word_onset - 500 ms, response]. Idempotent.
Cohort exclude_trials(const Cohort& cohort, const std::set<std::string>& excluded_sentences);

struct SummaryReport {
  std::map<std::string, std::size_t> group_counts;   // "C","D","S"
  std::map<std::string, std::size_t> gender_counts;  // "F","M","other"
  std::size_t participants = 0;
  std::size_t trials_total = 0;
  std::size_t trials_retained = 0;
  std::size_t trials_missed = 0;
  // Mean button-press latency relative to final-word onset, over answered trials.
  double mean_response_latency_ms = 0.0;
  std::size_t issues = 0;

  std::string to_json() const;
};

SummaryReport cohort_summary(const Cohort& cohort);

}  // namespace gazenet
