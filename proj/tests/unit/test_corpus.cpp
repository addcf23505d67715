#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "gazenet/corpus.hpp"

using namespace gazenet;

namespace {

Cohort small_cohort() {
  Cohort c;
  c.participants.push_back(fixtures::participant("C01", Group::C, 8));
  c.participants.push_back(fixtures::participant("D01", Group::D, 8, 2));
  c.participants.push_back(fixtures::participant("S01", Group::S, 8));
  return c;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("three participants load") {
    fixtures::TempDir dir("corpus_load");
    const auto paths = CohortPaths::under(dir.str());
    write_cohort(small_cohort(), paths);
    const Cohort loaded = load_cohort(paths);
    CHECK(loaded.participants.size() == 3);
    CHECK(loaded.issues.empty());
  }

  TEST_CASE("serialize round trip is bit exact") {
    fixtures::TempDir dir("corpus_roundtrip");
    Cohort c = small_cohort();
    c.participants[0].info.phq9 = 3;
    c.participants[0].gaze.samples[5].x_px = 1234.5678901234567;
    c.participants[0].gaze.samples[6].valid = false;
    c.participants[0].gaze.events.push_back({EventKind::Blink, 100.0, 260.0});
    const auto paths = CohortPaths::under(dir.str());
    write_cohort(c, paths);
    const Cohort back = load_cohort(paths);
    REQUIRE(back.participants.size() == c.participants.size());
    for (std::size_t i = 0; i < c.participants.size(); ++i) {
      const auto& a = c.participants[i];
      const auto& b = back.participants[i];
      CHECK(a.info.id == b.info.id);
      CHECK(a.info.phq9 == b.info.phq9);
      REQUIRE(a.gaze.samples.size() == b.gaze.samples.size());
      for (std::size_t k = 0; k < a.gaze.samples.size(); ++k) {
        CHECK(a.gaze.samples[k].t_ms == b.gaze.samples[k].t_ms);
        CHECK(a.gaze.samples[k].x_px == b.gaze.samples[k].x_px);
        CHECK(a.gaze.samples[k].y_px == b.gaze.samples[k].y_px);
        CHECK(a.gaze.samples[k].valid == b.gaze.samples[k].valid);
      }
      REQUIRE(a.gaze.events.size() == b.gaze.events.size());
      REQUIRE(a.trials.size() == b.trials.size());
      for (std::size_t k = 0; k < a.trials.size(); ++k) {
        CHECK(a.trials[k].final_word_onset_ms == b.trials[k].final_word_onset_ms);
        CHECK(a.trials[k].response_time_ms == b.trials[k].response_time_ms);
        CHECK(a.trials[k].response == b.trials[k].response);
        CHECK(a.trials[k].sentiment == b.trials[k].sentiment);
      }
    }
  }

  TEST_CASE("group/score mismatch is reported") {
    Participant p;
    p.id = "D09";
    p.group = Group::D;
    p.phq9 = 3;
    REQUIRE(check_group_scores(p).has_value());
    CHECK(*check_group_scores(p) == "group/score mismatch");
    p.phq9 = 12;
    CHECK_FALSE(check_group_scores(p).has_value());

    fixtures::TempDir dir("corpus_mismatch");
    Cohort c = small_cohort();
    c.participants[1].info.phq9 = 3;
    const auto paths = CohortPaths::under(dir.str());
    write_cohort(c, paths);
    const Cohort loaded = load_cohort(paths);
    CHECK(loaded.participants.size() == 2);
    REQUIRE(loaded.issues.size() == 1);
    CHECK(loaded.issues[0].message.find("group/score mismatch") != std::string::npos);
  }

  TEST_CASE("non-monotonic timestamps name the first bad index") {
    GazeRecording rec = fixtures::constant_recording(10);
    rec.samples[6].t_ms = rec.samples[5].t_ms;
    try {
      validate_recording(rec);
      FAIL("expected an ingest error");
    } catch (const IngestError& e) {
      CHECK(std::string(e.what()).find("sample 6") != std::string::npos);
    }
  }

  TEST_CASE("exclusion arithmetic") {
    Cohort c;
    c.participants.push_back(fixtures::participant("C01", Group::C, 160));
    CHECK(c.participants[0].trials.size() == 320);
    std::set<std::string> drop;
    for (int i = 0; i < 12; ++i) drop.insert("s" + std::to_string(i));
    const Cohort a = exclude_trials(c, drop);
    CHECK(a.participants[0].retained_count() == 296);
    CHECK(exclude_trials(c, {}).participants[0].retained_count() == 320);

    Cohort m;
    m.participants.push_back(fixtures::participant("C02", Group::C, 160, 5));
    // The five misses are first presentations of s0..s4, outside the excluded sentences.
    std::set<std::string> late;
    for (int i = 148; i < 160; ++i) late.insert("s" + std::to_string(i));
    CHECK(exclude_trials(m, late).participants[0].retained_count() == 291);
  }

  TEST_CASE("exclude_trials is idempotent") {
    Cohort c = small_cohort();
    const Cohort once = exclude_trials(c, {"s1"});
    const Cohort twice = exclude_trials(once, {"s1"});
    for (std::size_t i = 0; i < c.participants.size(); ++i) {
      for (std::size_t k = 0; k < once.participants[i].trials.size(); ++k) {
        CHECK(once.participants[i].trials[k].excluded == twice.participants[i].trials[k].excluded);
        CHECK(once.participants[i].trials[k].exclusion_reason == twice.participants[i].trials[k].exclusion_reason);
      }
    }
    CHECK_THROWS_AS(exclude_trials(c, {"nope"}), ConfigError);
  }

  TEST_CASE("retained trials have a response and gaze coverage") {
    Cohort c = small_cohort();
    c.participants[2].trials.back().response_time_ms = 1e9;
    const Cohort e = exclude_trials(c, {});
    for (const auto& p : e.participants) {
      const double t0 = p.gaze.samples.front().t_ms, t1 = p.gaze.samples.back().t_ms;
      for (const auto& t : p.trials) {
        if (t.excluded) continue;
        REQUIRE(t.response_time_ms.has_value());
        CHECK(t.final_word_onset_ms - 500.0 >= t0);
        CHECK(*t.response_time_ms <= t1);
      }
    }
    CHECK(e.participants[2].trials.back().excluded);
  }

  TEST_CASE("summary counts") {
    Cohort c;
    auto add = [&](Group g, int n) {
      for (int i = 0; i < n; ++i) {
        ParticipantData p;
        p.info.id = std::string(to_string(g)) + std::to_string(i);
        p.info.group = g;
        c.participants.push_back(p);
      }
    };
    add(Group::C, 43);
    add(Group::D, 40);
    add(Group::S, 43);
    const auto s = cohort_summary(c);
    CHECK(s.group_counts.at("C") == 43);
    CHECK(s.group_counts.at("D") == 40);
    CHECK(s.group_counts.at("S") == 43);
    const auto empty = cohort_summary(Cohort{});
    CHECK(empty.participants == 0);
    CHECK(empty.trials_total == 0);
    CHECK_FALSE(empty.to_json().empty());
  }

  TEST_CASE("malformed files raise parse errors with line numbers") {
    fixtures::TempDir dir("corpus_parse");
    const std::string path = dir / "roster.csv";
    {
      std::ofstream out(path);
      out << "id,group,gender,phq9,sis,gad7\nC01,C,F,,,\nC02,X,F,,,\n";
    }
    try {
      read_roster(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("AOI geometry validation") {
    ScreenGeometry g;
    CHECK_NOTHROW(g.validate());
    g.disagree_aoi = g.agree_aoi;
    CHECK_THROWS_AS(g.validate(), ConfigError);
  }
}
