#include "gazenet/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <nlohmann/json.hpp>

namespace gazenet {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  for (int y : labels) {
    if (y != 0 && y != 1) throw MetricError("labels must be 0 or 1");
  }
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += y == 1 ? 1 : 0;
  return {labels.size() - pos, pos};
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto [n_neg, n_pos] = class_counts(labels);
  if (n_neg == 0 || n_pos == 0) throw MetricError("AUC undefined: one class absent");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the rank sum of the positives (ranks are 1-based, ties averaged),
  // kept integral so the statistic is exact.
  unsigned long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const unsigned long long twice_avg_rank = (i + 1) + j;  // (i+1 + j) / 2 * 2
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) twice_rank_sum += twice_avg_rank;
    }
    i = j;
  }
  const unsigned long long twice_u = twice_rank_sum - static_cast<unsigned long long>(n_pos) * (n_pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

SensSpec sens_spec(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  const auto [n_neg, n_pos] = class_counts(labels);
  if (n_neg == 0 || n_pos == 0) throw MetricError("sensitivity/specificity undefined: one class absent");
  std::size_t tp = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1 && predicted) ++tp;
    if (labels[i] == 0 && !predicted) ++tn;
  }
  return {static_cast<double>(tp) / static_cast<double>(n_pos), static_cast<double>(tn) / static_cast<double>(n_neg)};
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto [n_neg, n_pos] = class_counts(labels);
  if (n_neg == 0 || n_pos == 0) throw MetricError("ROC undefined: one class absent");
  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> out;
  out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  for (double t : thresholds) {
    const auto ss = sens_spec(scores, labels, t);
    out.push_back({1.0 - ss.specificity, ss.sensitivity, t});
  }
  return out;
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : points) {
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," +
           (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "\n";
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw MetricError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> bootstrap_values(std::span<const double> scores, std::span<const int> labels, const Metric& metric,
                                     std::size_t iters, std::uint64_t seed) {
  const std::size_t n = scores.size();
  if (n < 2) throw MetricError("bootstrap needs at least two observations");
  if (labels.size() != n) throw MetricError("scores and labels differ in length");
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(iters);
  std::vector<double> s(n);
  std::vector<int> y(n);
  std::size_t undefined = 0;
  while (out.size() < iters) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.index(n);
      s[i] = scores[j];
      y[i] = labels[j];
    }
    try {
      out.push_back(metric(s, y));
    } catch (const MetricError&) {
      if (++undefined > iters) throw MetricError("bootstrap CI undefined: metric failed on most resamples");
    }
  }
  return out;
}

Interval bootstrap_ci(std::span<const double> scores, std::span<const int> labels, const Metric& metric,
                      std::size_t iters, std::uint64_t seed) {
  const auto values = bootstrap_values(scores, labels, metric, iters, seed);
  return {percentile(values, 0.025), percentile(values, 0.975)};
}

double permutation_p(double real_ci_lower, std::span<const double> null_scores, std::span<const int> labels,
                     std::size_t iters, std::uint64_t seed) {
  if (null_scores.empty()) throw MetricError("permutation test needs null scores");
  const auto values = bootstrap_values(null_scores, labels, roc_auc, iters, seed);
  std::size_t hits = 0;
  for (double v : values) hits += v >= real_ci_lower ? 1 : 0;
  return std::max(static_cast<double>(hits) / static_cast<double>(iters), kPermutationFloor);
}

std::vector<double> fdr_bh(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double v = std::min(1.0, p[idx[r]] * static_cast<double>(m) / static_cast<double>(r + 1));
    running = std::min(running, v);
    out[idx[r]] = running;
  }
  return out;
}

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double var_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

// Kolmogorov distribution survival function.
double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0, prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) <= 1e-12 * std::fabs(sum) || std::fabs(term) <= 1e-300) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
    prev = term;
  }
  (void)prev;
  return 1.0;
}

}  // namespace

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw MetricError("t-test needs two observations per sample");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = var_of(a, ma) / static_cast<double>(a.size());
  const double vb = var_of(b, mb) / static_cast<double>(b.size());
  TestResult r;
  const double se2 = va + vb;
  if (se2 == 0.0) {
    r.statistic = ma == mb ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.df = static_cast<double>(a.size() + b.size() - 2);
    r.p = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.statistic = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.statistic)));
  return r;
}

TestResult chi_square_uniform(std::span<const double> counts) {
  if (counts.size() < 2) throw MetricError("chi-square test needs at least two cells");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw MetricError("chi-square test on empty counts");
  const double expected = total / static_cast<double>(counts.size());
  TestResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.df = static_cast<double>(counts.size() - 1);
  boost::math::chi_squared dist(r.df);
  r.p = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw MetricError("KS test on an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double en = std::sqrt(nx * ny / (nx + ny));
  TestResult r;
  r.statistic = d;
  r.p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  return r;
}

TestResult levene_test(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw MetricError("Levene test needs at least two groups");
  std::vector<std::vector<double>> z(k);
  std::size_t n_total = 0;
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].empty()) throw MetricError("Levene test on an empty group");
    const double m = mean_of(groups[g]);
    for (double v : groups[g]) z[g].push_back(std::fabs(v - m));
    n_total += groups[g].size();
  }
  if (n_total <= k) throw MetricError("Levene test needs more observations than groups");
  double grand = 0.0;
  for (const auto& zg : z) grand += std::accumulate(zg.begin(), zg.end(), 0.0);
  grand /= static_cast<double>(n_total);
  double between = 0.0, within = 0.0;
  for (const auto& zg : z) {
    const double mg = mean_of(zg);
    between += static_cast<double>(zg.size()) * (mg - grand) * (mg - grand);
    for (double v : zg) within += (v - mg) * (v - mg);
  }
  TestResult r;
  const double df1 = static_cast<double>(k - 1), df2 = static_cast<double>(n_total - k);
  r.df = df1;
  if (within == 0.0) {
    r.statistic = between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.p = between == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.statistic = (df2 / df1) * between / within;
  boost::math::fisher_f dist(df1, df2);
  r.p = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

double sensitivity_metric(std::span<const double> s, std::span<const int> y) { return sens_spec(s, y).sensitivity; }
double specificity_metric(std::span<const double> s, std::span<const int> y) { return sens_spec(s, y).specificity; }
double mean_metric(std::span<const double> s, std::span<const int>) { return mean_of(s); }

nlohmann::ordered_json interval_json(const Interval& i) { return nlohmann::ordered_json::array({i.lo, i.hi}); }

}  // namespace

EvalReport evaluate(const ScoreTable& table, std::size_t iters, std::uint64_t seed) {
  EvalReport r;
  r.task = table.task;
  r.alignment = table.alignment;
  r.n_participants = table.rows.size();
  r.n_bootstrap = iters;
  const auto scores = table.scores();
  const auto labels = table.labels();
  r.auc = roc_auc(scores, labels);
  r.auc_ci = bootstrap_ci(scores, labels, roc_auc, iters, derive_seed(seed, {"bootstrap", "auc"}));
  const auto ss = sens_spec(scores, labels);
  r.sensitivity = ss.sensitivity;
  r.specificity = ss.specificity;
  r.sensitivity_ci = bootstrap_ci(scores, labels, sensitivity_metric, iters, derive_seed(seed, {"bootstrap", "sens"}));
  r.specificity_ci = bootstrap_ci(scores, labels, specificity_metric, iters, derive_seed(seed, {"bootstrap", "spec"}));
  for (Group g : kGroups) {
    std::vector<double> v;
    for (const auto& row : table.rows) {
      if (row.group == g) v.push_back(row.score);
    }
    if (v.empty()) continue;
    GroupSummary gs;
    gs.n = v.size();
    gs.mean = mean_of(v);
    if (v.size() >= 2) {
      std::vector<int> dummy(v.size(), 0);
      gs.ci = bootstrap_ci(v, dummy, mean_metric, iters, derive_seed(seed, {"bootstrap", "group", to_string(g)}));
    } else {
      gs.ci = {gs.mean, gs.mean};
    }
    r.groups[std::string(to_string(g))] = gs;
  }
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = to_string(task);
  j["alignment"] = to_string(alignment);
  j["model"] = model;
  j["config_hash"] = config_hash;
  j["n_participants"] = n_participants;
  j["n_bootstrap"] = n_bootstrap;
  j["auc"] = auc;
  j["auc_ci"] = interval_json(auc_ci);
  j["sensitivity"] = sensitivity;
  j["sensitivity_ci"] = interval_json(sensitivity_ci);
  j["specificity"] = specificity;
  j["specificity_ci"] = interval_json(specificity_ci);
  j["threshold"] = 0.5;
  auto& g = j["groups"];
  g = nlohmann::ordered_json::object();
  for (const auto& [name, gs] : groups) {
    g[name] = {{"n", gs.n}, {"mean_score", gs.mean}, {"ci", interval_json(gs.ci)}};
  }
  j["p_perm"] = p_perm ? nlohmann::ordered_json(*p_perm) : nlohmann::ordered_json(nullptr);
  auto& s = j["seed_auc"];
  s = nlohmann::ordered_json::array();
  for (const auto& v : seed_auc) s.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
  j["seed_auc_note"] = "per-seed AUCs feed the two-sample t-tests between configurations";
  return j.dump(2);
}

ScoreTable restrict_to_task(const ScoreTable& table, TaskName eval_task) {
  const auto spec = TaskSpec::make(eval_task);
  ScoreTable out;
  out.task = eval_task;
  out.alignment = table.alignment;
  for (const auto& row : table.rows) {
    const auto label = spec.label(row.group);
    if (!label) continue;
    ScoreRow r = row;
    r.label = *label;
    out.rows.push_back(std::move(r));
  }
  return out;
}

CrossTaskMatrix cross_task_matrix(const std::map<TaskName, ScoreTable>& tables, std::size_t iters, std::uint64_t seed) {
  CrossTaskMatrix m{};
  for (std::size_t i = 0; i < kTasks.size(); ++i) {
    const auto it = tables.find(kTasks[i]);
    for (std::size_t j = 0; j < kTasks.size(); ++j) {
      auto& cell = m[i][j];
      if (it == tables.end()) {
        cell.note = "missing score table";
        continue;
      }
      const ScoreTable sub = restrict_to_task(it->second, kTasks[j]);
      try {
        const auto s = sub.scores();
        const auto y = sub.labels();
        cell.auc = roc_auc(s, y);
        cell.ci = bootstrap_ci(s, y, roc_auc, iters, derive_seed(seed, {"bootstrap", "auc"}));
        cell.present = true;
      } catch (const MetricError& e) {
        cell.note = e.what();
      }
    }
  }
  return m;
}

std::string cross_task_csv(const CrossTaskMatrix& m) {
  std::string out = "train_task,eval_task,auc,ci_lo,ci_hi,note\n";
  for (std::size_t i = 0; i < kTasks.size(); ++i) {
    for (std::size_t j = 0; j < kTasks.size(); ++j) {
      const auto& c = m[i][j];
      out += std::string(to_string(kTasks[i])) + "," + std::string(to_string(kTasks[j])) + ",";
      if (c.present) {
        out += format_double(c.auc) + "," + format_double(c.ci.lo) + "," + format_double(c.ci.hi) + ",";
      } else {
        out += ",,,";
      }
      out += c.note + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

LogisticModel LogisticModel::fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                 const LogisticConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw MetricError("logistic regression needs matching, non-empty data");
  const std::size_t d = x.front().size();
  const double n = static_cast<double>(x.size());
  LogisticModel m;
  m.mean_.assign(d, 0.0);
  m.sd_.assign(d, 0.0);
  m.w_.assign(d, 0.0);
  for (const auto& row : x) {
    if (row.size() != d) throw MetricError("ragged feature matrix");
    for (std::size_t k = 0; k < d; ++k) m.mean_[k] += row[k] / n;
  }
  for (const auto& row : x) {
    for (std::size_t k = 0; k < d; ++k) m.sd_[k] += (row[k] - m.mean_[k]) * (row[k] - m.mean_[k]) / n;
  }
  for (auto& s : m.sd_) s = s > 0.0 ? std::sqrt(s) : 1.0;

  std::vector<std::vector<double>> z(x.size(), std::vector<double>(d));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) z[i][k] = (x[i][k] - m.mean_[k]) / m.sd_[k];
  }
  std::vector<double> gw(d);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double a = m.b_;
      for (std::size_t k = 0; k < d; ++k) a += m.w_[k] * z[i][k];
      const double r = 1.0 / (1.0 + std::exp(-a)) - static_cast<double>(y[i]);
      for (std::size_t k = 0; k < d; ++k) gw[k] += r * z[i][k] / n;
      gb += r / n;
    }
    for (std::size_t k = 0; k < d; ++k) m.w_[k] -= cfg.lr * (gw[k] + cfg.l2 * m.w_[k]);
    m.b_ -= cfg.lr * gb;
  }
  return m;
}

double LogisticModel::predict(const std::vector<double>& x) const {
  double a = b_;
  for (std::size_t k = 0; k < w_.size(); ++k) a += w_[k] * (x.at(k) - mean_[k]) / sd_[k];
  return 1.0 / (1.0 + std::exp(-a));
}

ScoreTable logistic_protocol(const std::vector<std::vector<double>>& features, const std::vector<Participant>& roster,
                             const FoldPlan& plan, Alignment alignment, const LogisticConfig& cfg) {
  if (features.size() != roster.size()) throw ConfigError("feature rows do not match the roster");
  const auto labels = task_labels(roster, plan.task);
  std::vector<double> score(roster.size(), 0.0);
  std::vector<int> fold(roster.size(), -1);
  for (std::size_t o = 0; o < plan.n_outer(); ++o) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (auto p : plan.outer_train(o)) {
      x.push_back(features[p]);
      y.push_back(labels[p]);
    }
    const auto model = LogisticModel::fit(x, y, cfg);
    for (auto p : plan.outer[o]) {
      score[p] = model.predict(features[p]);
      fold[p] = static_cast<int>(o);
    }
    for (auto p : plan.zero_shot) score[p] += model.predict(features[p]) / static_cast<double>(plan.n_outer());
  }
  ScoreTable t;
  t.task = plan.task.name;
  t.alignment = alignment;
  for (std::size_t p = 0; p < roster.size(); ++p) {
    const bool planned = fold[p] >= 0 || std::find(plan.zero_shot.begin(), plan.zero_shot.end(), p) != plan.zero_shot.end();
    if (!planned) continue;
    ScoreRow r;
    r.participant_id = roster[p].id;
    r.group = roster[p].group;
    r.gender = roster[p].gender;
    r.label = labels[p];
    r.fold = fold[p];
    r.score = score[p];
    r.per_seed = {score[p]};
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::vector<std::vector<double>> fixation_ratio_features(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                                         const ScreenGeometry& geom, double window_ms) {
  geom.validate();
  if (!(window_ms > 0.0)) throw ConfigError("fixation window must be positive");
  std::vector<std::vector<double>> out;
  for (const auto& p : cohort.participants) {
    const CleanRecording* rec = nullptr;
    for (const auto& c : cleans) {
      if (c.participant_id == p.info.id) rec = &c;
    }
    if (!rec) throw DependencyError("no clean recording for " + p.info.id);
    std::array<double, 2> sum{0.0, 0.0};
    std::array<std::size_t, 2> count{0, 0};
    for (const auto& t : p.trials) {
      if (t.excluded || !t.response_time_ms) continue;
      const double end = *t.response_time_ms;
      const auto lo = std::lower_bound(rec->t_ms.begin(), rec->t_ms.end(), end - window_ms) - rec->t_ms.begin();
      const auto hi = std::lower_bound(rec->t_ms.begin(), rec->t_ms.end(), end) - rec->t_ms.begin();
      if (hi <= lo) continue;
      double agree = 0.0, disagree = 0.0;
      for (auto i = lo; i < hi; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (geom.agree_aoi.contains(rec->x[k], rec->y[k])) agree += 1.0;
        if (geom.disagree_aoi.contains(rec->x[k], rec->y[k])) disagree += 1.0;
      }
      const auto si = static_cast<std::size_t>(t.sentiment);
      sum[si] += (agree - disagree) / static_cast<double>(hi - lo);
      count[si] += 1;
    }
    out.push_back({count[0] ? sum[0] / static_cast<double>(count[0]) : 0.0,
                   count[1] ? sum[1] / static_cast<double>(count[1]) : 0.0});
  }
  return out;
}

std::vector<std::vector<double>> response_features(const Cohort& cohort) {
  std::vector<std::vector<double>> out;
  for (const auto& p : cohort.participants) {
    std::array<double, 2> agree{0.0, 0.0}, answered{0.0, 0.0};
    for (const auto& t : p.trials) {
      if (t.excluded || t.response == Response::Missed) continue;
      const auto si = static_cast<std::size_t>(t.sentiment);
      answered[si] += 1.0;
      if (t.response == Response::Agree) agree[si] += 1.0;
    }
    out.push_back({answered[0] > 0 ? agree[0] / answered[0] : 0.0, answered[1] > 0 ? agree[1] / answered[1] : 0.0});
  }
  return out;
}

EvalReport baseline_fixation_ratio(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                   const ScreenGeometry& geom, const FoldPlan& plan, double window_ms,
                                   std::size_t iters, std::uint64_t seed) {
  const auto features = fixation_ratio_features(cohort, cleans, geom, window_ms);
  auto report = evaluate(logistic_protocol(features, roster_of(cohort), plan, Alignment::Response), iters, seed);
  report.model = "fixation_ratio_logistic";
  return report;
}

EvalReport baseline_response_only(const Cohort& cohort, const FoldPlan& plan, std::size_t iters, std::uint64_t seed) {
  auto report = evaluate(logistic_protocol(response_features(cohort), roster_of(cohort), plan, Alignment::Response),
                         iters, seed);
  report.model = "response_logistic";
  return report;
}

}  // namespace gazenet
