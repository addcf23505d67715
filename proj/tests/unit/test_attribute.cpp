#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "gazenet/attribute.hpp"
#include "gazenet/stats.hpp"

using namespace gazenet;

namespace {

nnet::Network<double> small_net(std::uint64_t seed, std::size_t length = 30) {
  nnet::ModelConfig c;
  c.length = length;
  c.filters = 4;
  c.hidden = 16;
  nnet::Network<double> net(c);
  net.init(seed);
  return net;
}

std::vector<double> random_set(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_SUITE("attribute") {
  TEST_CASE("completeness: attributions sum to P(x) - P(0)") {
    Rng rng(1);
    const auto net = small_net(2);
    const std::size_t rows = 6, n = 2 * rows * 30;
    for (int s = 0; s < 10; ++s) {
      const auto neg = random_set(rng, n), pos = random_set(rng, n);
      const auto a = integrated_gradients(net, neg.data(), pos.data(), rows, 50);
      nnet::Workspace<double> ws;
      CHECK(a.prob == net.forward(neg.data(), pos.data(), rows, ws));
      CHECK(std::fabs(a.total() - (a.prob - a.baseline_prob)) <= 1e-3);
    }
  }

  TEST_CASE("zero input gives zero attribution") {
    const auto net = small_net(3);
    const std::vector<double> zero(2 * 4 * 30, 0.0);
    const auto a = integrated_gradients(net, zero.data(), zero.data(), 4, 20);
    for (double v : a.neg) CHECK(v == 0.0);
    for (double v : a.pos) CHECK(v == 0.0);
    CHECK(a.prob == a.baseline_prob);
    CHECK_THROWS_AS(integrated_gradients(net, zero.data(), zero.data(), 4, 0), ConfigError);
  }

  TEST_CASE("completeness error shrinks with more steps") {
    Rng rng(4);
    const auto net = small_net(5);
    const std::size_t rows = 5, n = 2 * rows * 30;
    auto neg = random_set(rng, n), pos = random_set(rng, n);
    for (auto& v : neg) v *= 3.0;
    auto gap = [&](std::size_t steps) {
      const auto a = integrated_gradients(net, neg.data(), pos.data(), rows, steps);
      return std::fabs(a.total() - (a.prob - a.baseline_prob));
    };
    const double coarse = gap(2), fine = gap(200);
    CHECK(fine <= coarse);
    CHECK(fine < 1e-4);
  }

  TEST_CASE("trial-mean series average rows per channel") {
    Attribution a;
    const std::size_t rows = 2, T = 3;
    a.neg = {1, 2, 3, 5, 6, 7, /* y */ 0, 0, 0, 2, 2, 2};
    a.pos = {1, 1, 1, 1, 1, 1, /* y */ -1, 0, 1, -3, 0, 3};
    const auto s = trial_mean_series(a, rows, T);
    CHECK(s[0] == std::vector<double>{3, 4, 5});
    CHECK(s[1] == std::vector<double>{1, 1, 1});
    CHECK(s[2] == std::vector<double>{1, 1, 1});
    CHECK(s[3] == std::vector<double>{-2, 0, 2});
  }

  TEST_CASE("aggregation: group means and standard errors") {
    std::vector<SubjectAttribution> subjects;
    for (int i = 0; i < 3; ++i) {
      SubjectAttribution s;
      s.participant_id = "D" + std::to_string(i);
      s.group = Group::D;
      s.n_samples = 2;
      for (auto& series : s.series) series = {static_cast<double>(i), 1.0};
      subjects.push_back(s);
    }
    const auto maps = aggregate_attributions(subjects);
    REQUIRE(maps.size() == 4);
    CHECK(maps[0].group == Group::D);
    CHECK(maps[0].values == std::vector<double>{1.0, 1.0});
    CHECK(maps[0].se[0] == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(maps[0].se[1] == 0.0);
    CHECK(maps[0].n_samples == 6);
    CHECK(maps[3].condition == Sentiment::PositiveNeutral);
    CHECK(maps[3].direction == Direction::Y);
    const auto csv = attribution_csv(maps);
    CHECK(csv.rfind("group,condition,direction,t,value,se,n_subjects,n_samples\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 2);
    CHECK_THROWS_AS(aggregate_attributions({}), MetricError);
  }

  TEST_CASE("fc weight readout reads the documented input blocks") {
    nnet::ModelConfig c;
    c.length = 5;
    c.hidden = 3;
    nnet::Network<float> net(c);
    auto p = net.mutable_params();
    const std::size_t nf = c.features();
    for (std::size_t j = 0; j < c.hidden; ++j) {
      for (std::size_t i = 0; i < nf; ++i) {
        const float sign = (i + j) % 2 ? -1.0f : 1.0f;
        p[net.layout().fc1_w + j * nf + i] = sign * static_cast<float>(i / c.length + 1) * static_cast<float>(j + 1);
      }
    }
    net.sync();
    const auto r = fc_weight_readout(net);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      for (double v : r[ch]) CHECK(v == doctest::Approx(static_cast<double>(ch + 1) * 2.0));
    }
    // CSV round trip through the text form.
    std::istringstream in(readout_csv(r));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,neg_x,neg_y,pos_x,pos_y");
    std::size_t t = 0;
    while (std::getline(in, line)) {
      const auto f = split_csv_line(line);
      REQUIRE(f.size() == 5);
      for (std::size_t ch = 0; ch < 4; ++ch) CHECK(parse_double(f[ch + 1], "readout", t + 2) == r[ch][t]);
      ++t;
    }
    CHECK(t == 5);
  }

  TEST_CASE("freshly initialized readout has equal spread across blocks (Levene)") {
    nnet::ModelConfig c;
    c.length = 300;
    nnet::Network<float> net(c);
    net.init(13);
    const auto r = fc_weight_readout(net);
    const auto lev = levene_test({r[0], r[1], r[2], r[3]});
    CHECK(lev.p > 0.01);
  }

  TEST_CASE("fixation density: hot bin, normalization, zoom") {
    Cohort cohort;
    cohort.participants.push_back(fixtures::participant("C01", Group::C, 4));
    cohort.participants.push_back(fixtures::participant("C02", Group::C, 4));
    std::vector<CleanRecording> cleans;
    for (const auto& p : cohort.participants) {
      auto rec = fixtures::ramp_clean(8000, 0.0, 0.0);
      rec.participant_id = p.info.id;
      std::fill(rec.x.begin(), rec.x.end(), -0.6);
      std::fill(rec.y.begin(), rec.y.end(), 0.1);
      cleans.push_back(rec);
    }
    DensityConfig cfg;
    cfg.nx = 10;
    cfg.ny = 10;
    auto maps = fixation_density(cohort, cleans, cfg);
    REQUIRE(maps.size() == 1);
    CHECK(maps[0].group == Group::C);
    CHECK(maps[0].n_subjects == 2);
    CHECK(std::accumulate(maps[0].values.begin(), maps[0].values.end(), 0.0) == doctest::Approx(1.0));
    CHECK(maps[0].at(2, 5) == doctest::Approx(1.0));  // x=-0.6 -> bin 2, y=0.1 -> bin 5

    cfg.zoom = 2.0;  // field [-0.5, 0.5]^2: every sample falls outside
    CHECK(fixation_density(cohort, cleans, cfg).empty());
    std::fill(cleans[0].x.begin(), cleans[0].x.end(), 0.3);
    maps = fixation_density(cohort, cleans, cfg);
    REQUIRE(maps.size() == 1);
    CHECK(maps[0].n_subjects == 1);
    CHECK(maps[0].at(8, 6) == doctest::Approx(1.0));
    const auto csv = density_csv(maps[0]);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
    cfg.zoom = 0.5;
    CHECK_THROWS_AS(fixation_density(cohort, cleans, cfg), ConfigError);
  }
}
