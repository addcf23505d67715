#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazenet/harness.hpp"

namespace gazenet {

// Mann-Whitney form: P(score_pos > score_neg) + 0.5 P(tie). Labels are 0/1.
// Throws MetricError when a class is absent.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct SensSpec {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

// A score >= threshold counts as a positive prediction.
SensSpec sens_spec(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct RocPoint {
  double fpr, tpr, threshold;
};
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
std::string roc_csv(const std::vector<RocPoint>& points);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

using Metric = std::function<double(std::span<const double>, std::span<const int>)>;

// Percentile q in [0,1] of a sample with linear interpolation between order
// statistics (sorts a copy).
double percentile(std::vector<double> values, double q);

// Resamples participants with replacement. Stream: Rng(seed); each attempt
// draws n indices with Rng::index(n). An attempt on which the metric throws
// MetricError (a class missing) is discarded and redrawn; the CI fails with
// MetricError once discarded attempts outnumber `iters`.
std::vector<double> bootstrap_values(std::span<const double> scores, std::span<const int> labels, const Metric& metric,
                                     std::size_t iters, std::uint64_t seed);
Interval bootstrap_ci(std::span<const double> scores, std::span<const int> labels, const Metric& metric,
                      std::size_t iters = 1000, std::uint64_t seed = 1);

inline constexpr double kPermutationFloor = 0.001;

// max(#{bootstrap AUC of the null scores >= real_ci_lower} / iters, 0.001).
double permutation_p(double real_ci_lower, std::span<const double> null_scores, std::span<const int> labels,
                     std::size_t iters = 1000, std::uint64_t seed = 1);

// Benjamini-Hochberg step-up adjusted p-values, in input order.
std::vector<double> fdr_bh(std::span<const double> p);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Two-sided Welch two-sample t-test.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);
// Pearson chi-square goodness of fit against equal expected counts.
TestResult chi_square_uniform(std::span<const double> counts);
// Two-sample Kolmogorov-Smirnov test; p from the limiting Kolmogorov
// distribution with Stephens' small-sample correction.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
// Levene (mean-centred) test for equal variances across groups.
TestResult levene_test(const std::vector<std::vector<double>>& groups);

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  Interval ci;
};

struct EvalReport {
  TaskName task = TaskName::CvDS;
  Alignment alignment = Alignment::Response;
  std::string model = "network";
  std::size_t n_participants = 0;
  std::size_t n_bootstrap = 1000;
  double auc = 0.0;
  Interval auc_ci;
  double sensitivity = 0.0;
  Interval sensitivity_ci;
  double specificity = 0.0;
  Interval specificity_ci;
  std::map<std::string, GroupSummary> groups;
  std::optional<double> p_perm;
  std::vector<std::optional<double>> seed_auc;
  std::string config_hash;

  std::string to_json() const;
};

// AUC, sensitivity and specificity at 0.5 over the labelled rows, each with a
// percentile bootstrap CI; per-group mean scores over every row.
EvalReport evaluate(const ScoreTable& table, std::size_t iters = 1000, std::uint64_t seed = 1);

// Rows of `table` restricted to the groups of `eval_task`, relabelled under it.
ScoreTable restrict_to_task(const ScoreTable& table, TaskName eval_task);

struct CrossTaskCell {
  bool present = false;
  double auc = 0.0;
  Interval ci;
  std::string note;
};

// [training task][evaluation task] in kTasks order. Missing training tables
// leave their row flagged.
using CrossTaskMatrix = std::array<std::array<CrossTaskCell, 4>, 4>;
CrossTaskMatrix cross_task_matrix(const std::map<TaskName, ScoreTable>& tables, std::size_t iters = 1000,
                                  std::uint64_t seed = 1);
std::string cross_task_csv(const CrossTaskMatrix& m);

// ---------------------------------------------------------------------------
// Behavioural baselines
// ---------------------------------------------------------------------------

struct LogisticConfig {
  double lr = 0.1;
  std::size_t iterations = 500;
  double l2 = 1e-4;
};

// Batch gradient descent on the mean log-loss plus 0.5 * l2 * |w|^2 (bias
// unpenalized). Features are standardized with the training mean and SD.
class LogisticModel {
 public:
  static LogisticModel fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                           const LogisticConfig& cfg = {});
  double predict(const std::vector<double>& x) const;
  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  std::vector<double> mean_, sd_, w_;
  double b_ = 0.0;
};

// Runs the outer folds of `plan` with a logistic model on per-participant
// feature vectors; zero-shot participants get the mean over fold models.
ScoreTable logistic_protocol(const std::vector<std::vector<double>>& features, const std::vector<Participant>& roster,
                             const FoldPlan& plan, Alignment alignment, const LogisticConfig& cfg = {});

// Per participant: mean over answered, retained trials of (fraction of gaze
// samples in the agree AOI - fraction in the disagree AOI) within
// [response - window, response), one feature per sentiment.
std::vector<std::vector<double>> fixation_ratio_features(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                                         const ScreenGeometry& geom, double window_ms = 100.0);
// Per participant: agree rate on negative and on positive/neutral sentences.
std::vector<std::vector<double>> response_features(const Cohort& cohort);

EvalReport baseline_fixation_ratio(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                   const ScreenGeometry& geom, const FoldPlan& plan, double window_ms = 100.0,
                                   std::size_t iters = 1000, std::uint64_t seed = 1);
EvalReport baseline_response_only(const Cohort& cohort, const FoldPlan& plan, std::size_t iters = 1000,
                                  std::uint64_t seed = 1);

}  // namespace gazenet
