#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "gazenet/harness.hpp"

using namespace gazenet;

namespace {

std::vector<Participant> make_roster(std::size_t c, std::size_t d, std::size_t s) {
  std::vector<Participant> out;
  auto add = [&](Group g, std::size_t n, const char* prefix) {
    for (std::size_t i = 0; i < n; ++i) {
      Participant p;
      p.id = prefix + std::to_string(i);
      p.group = g;
      p.gender = i % 3 == 0 ? Gender::M : Gender::F;
      out.push_back(p);
    }
  };
  add(Group::C, c, "C");
  add(Group::D, d, "D");
  add(Group::S, s, "S");
  return out;
}

// Short segments whose negative-trial x level separates C from D/S.
SegmentStore toy_segments(const std::vector<Participant>& roster, std::size_t length, double effect, std::uint64_t seed) {
  SegmentStore store;
  store.length = length;
  Rng rng(seed);
  for (const auto& p : roster) {
    ParticipantSegments ps;
    ps.participant_id = p.id;
    ps.group = p.group;
    ps.gender = p.gender;
    const double level = p.group == Group::C ? 0.0 : effect;
    for (auto s : kSentiments) {
      for (int k = 0; k < 6; ++k) {
        TrialSegment seg;
        seg.trial_id = p.id + "_" + std::to_string(static_cast<int>(s)) + std::to_string(k);
        seg.sentiment = s;
        seg.length = length;
        seg.data.resize(2 * length);
        for (auto& v : seg.data) v = static_cast<float>(0.2 * rng.normal());
        if (s == Sentiment::Negative) {
          for (std::size_t t = 0; t < length; ++t) seg.data[t] += static_cast<float>(level);
        }
        ps.of(s).push_back(seg);
      }
    }
    store.participants.push_back(ps);
  }
  return store;
}

TrainConfig toy_train(std::size_t length) {
  TrainConfig c;
  c.model.length = length;
  c.model.filters = 2;
  c.model.hidden = 8;
  c.batch_size = 16;
  c.max_epochs = 15;
  c.patience = 3;
  c.adam.lr = 3e-3;
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("126 participants give folds of 26,25,25,25,25 and partition the roster") {
    const auto roster = make_roster(43, 40, 43);
    const auto plan = plan_folds(roster, TaskSpec::make(TaskName::CvDS), 3);
    std::vector<std::size_t> sizes;
    std::set<std::size_t> seen;
    for (const auto& f : plan.outer) {
      sizes.push_back(f.size());
      for (auto i : f) CHECK(seen.insert(i).second);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    CHECK(sizes == std::vector<std::size_t>{26, 25, 25, 25, 25});
    CHECK(seen.size() == 126);
    CHECK(plan.n_inner() == 10);
  }

  TEST_CASE("10 participants in 5 folds gives 2 per fold") {
    const auto plan = plan_folds(make_roster(4, 3, 3), TaskSpec::make(TaskName::CvDS), 1);
    for (const auto& f : plan.outer) CHECK(f.size() == 2);
    CHECK_THROWS_AS(plan_folds(make_roster(2, 1, 1), TaskSpec::make(TaskName::CvDS), 1), ConfigError);
  }

  TEST_CASE("stratification, no leakage, zero-shot isolation, determinism") {
    const auto roster = make_roster(43, 40, 43);
    for (TaskName name : kTasks) {
      const auto task = TaskSpec::make(name);
      const auto plan = plan_folds(roster, task, 17);
      const auto again = plan_folds(roster, task, 17);
      CHECK(plan.outer == again.outer);
      // Stratum counts per fold differ by at most one.
      std::map<std::pair<int, int>, std::vector<int>> strata;
      for (std::size_t f = 0; f < plan.n_outer(); ++f) {
        for (auto i : plan.outer[f]) {
          auto& v = strata[{static_cast<int>(roster[i].group), static_cast<int>(roster[i].gender)}];
          v.resize(plan.n_outer());
          ++v[f];
        }
      }
      for (const auto& [key, counts] : strata) {
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
      }
      const std::set<std::size_t> zs(plan.zero_shot.begin(), plan.zero_shot.end());
      for (auto i : plan.zero_shot) CHECK_FALSE(task.in_task(roster[i].group));
      for (std::size_t f = 0; f < plan.n_outer(); ++f) {
        const std::set<std::size_t> test(plan.outer[f].begin(), plan.outer[f].end());
        for (const auto& split : plan.inner[f]) {
          std::set<std::size_t> tr(split.train.begin(), split.train.end());
          for (auto i : split.val) CHECK(tr.count(i) == 0);
          for (auto i : split.train) {
            CHECK(test.count(i) == 0);
            CHECK(zs.count(i) == 0);
          }
          for (auto i : split.val) CHECK(test.count(i) == 0);
          const double frac = static_cast<double>(split.val.size()) / (split.val.size() + split.train.size());
          CHECK(frac == doctest::Approx(0.2).epsilon(0.1));
        }
      }
    }
  }

  TEST_CASE("score_subject examples") {
    CHECK(score_subject(std::vector<float>(200, 0.9f)) == 1.0);
    std::vector<float> half(200, 0.1f);
    std::fill_n(half.begin(), 100, 0.7f);
    CHECK(score_subject(half) == 0.5);
    CHECK(score_subject({0.5f, 0.49999f}) == 0.5);
  }

  TEST_CASE("task labels") {
    const auto roster = make_roster(2, 2, 2);
    CHECK(task_labels(roster, TaskSpec::make(TaskName::CvDS)) == std::vector<int>{0, 0, 1, 1, 1, 1});
    CHECK(task_labels(roster, TaskSpec::make(TaskName::CvD)) == std::vector<int>{0, 0, 1, 1, -1, -1});
    CHECK(task_labels(roster, TaskSpec::make(TaskName::DvS)) == std::vector<int>{-1, -1, 0, 0, 1, 1});
  }

  TEST_CASE("training is deterministic and keeps the best epoch") {
    const auto roster = make_roster(5, 5, 5);
    const auto segs = toy_segments(roster, 20, 0.6, 1);
    const auto sets = make_sets(segs, 4, 8, 2);
    SampleSource src(segs, sets);
    const auto task = TaskSpec::make(TaskName::CvDS);
    const auto plan = plan_folds(roster, task, 5, 5, 2);
    const auto labels = task_labels(roster, task);
    const auto cfg = toy_train(20);
    const auto a = train_fold(plan, 0, 0, src, labels, cfg, 9);
    const auto b = train_fold(plan, 0, 0, src, labels, cfg, 9);
    CHECK(a.val_loss == b.val_loss);
    CHECK(std::equal(a.net.params().begin(), a.net.params().end(), b.net.params().begin()));
    REQUIRE_FALSE(a.val_loss.empty());
    CHECK(a.val_loss.back() < a.val_loss.front() * 1.5);
    const auto best = std::min_element(a.val_loss.begin(), a.val_loss.end()) - a.val_loss.begin() + 1;
    CHECK(a.best_epoch == static_cast<std::size_t>(best));
    if (a.val_loss.size() < cfg.max_epochs) CHECK(a.val_loss.size() == a.best_epoch + cfg.patience);
    CHECK(*std::min_element(a.val_loss.begin(), a.val_loss.end()) < 0.69);
  }

  TEST_CASE("protocol scores every participant and orders the groups") {
    const auto roster = make_roster(5, 5, 5);
    const auto segs = toy_segments(roster, 20, 0.6, 3);
    const auto sets = make_sets(segs, 4, 8, 4);
    SampleSource src(segs, sets);
    ProtocolConfig pc;
    pc.n_outer = 5;
    pc.n_inner = 2;
    pc.train = toy_train(20);
    pc.seed = 11;
    const auto r = run_protocol(src, roster, TaskSpec::make(TaskName::CvD), Alignment::Response, pc);
    REQUIRE(r.table.rows.size() == 15);
    CHECK(r.runs.size() == 10);
    double c = 0, d = 0;
    for (const auto& row : r.table.rows) {
      CHECK(row.per_seed.size() == 2);
      CHECK(row.score == doctest::Approx((row.per_seed[0] + row.per_seed[1]) / 2));
      if (row.group == Group::S) {
        CHECK(row.label == -1);
        CHECK(row.fold == -1);
      }
      if (row.group == Group::C) c += row.score / 5;
      if (row.group == Group::D) d += row.score / 5;
    }
    CHECK(c < d);
    const auto again = run_protocol(src, roster, TaskSpec::make(TaskName::CvD), Alignment::Response, pc);
    CHECK(again.table.to_csv() == r.table.to_csv());
  }

  TEST_CASE("score table CSV round trip") {
    ScoreTable t;
    t.task = TaskName::CvS;
    t.alignment = Alignment::Reading;
    t.rows.push_back({"C01", Group::C, Gender::F, 0, 2, 0.125, {0.1, 0.15}});
    t.rows.push_back({"S03", Group::S, Gender::M, 1, 0, 0.8, {0.8, 0.8}});
    t.rows.push_back({"D02", Group::D, Gender::F, -1, -1, 1.0 / 3.0, {1.0 / 3.0, 1.0 / 3.0}});
    const auto back = ScoreTable::from_csv(t.to_csv());
    CHECK(back.to_csv() == t.to_csv());
    CHECK(back.rows[2].score == 1.0 / 3.0);
    CHECK(back.labelled() == std::vector<std::size_t>{0, 1});
    CHECK_THROWS(ScoreTable::from_csv("garbage\n1,2\n"));
  }
}
