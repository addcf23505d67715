#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gazenet/harness.hpp"
#include "gazenet/nnet.hpp"
#include "gazenet/preprocess.hpp"
#include "gazenet/synth.hpp"

namespace gazenet {

// Input-channel order used by every attribution series: [neg-x, neg-y, pos-x, pos-y].
inline constexpr std::array<const char*, 4> kChannelNames{"neg_x", "neg_y", "pos_x", "pos_y"};

struct Attribution {
  std::vector<double> neg;  // 2 x rows x T, same layout as the input
  std::vector<double> pos;
  double prob = 0.0;           // P(x)
  double baseline_prob = 0.0;  // P(0)

  double total() const;
};

// Integrated gradients of P(positive) from the all-zero input, midpoint rule:
//   a_i = x_i * mean_k dP/dx_i at ((k - 1/2) / steps) x.
// Throws ModelFault on non-finite gradients.
Attribution integrated_gradients(const nnet::Network<double>& net, const double* neg, const double* pos,
                                 std::size_t rows, std::size_t steps = 50);

// Mean over the trial axis: 4 series of length T in channel order.
std::array<std::vector<double>, 4> trial_mean_series(const Attribution& a, std::size_t rows, std::size_t length);

// Per participant: trial-mean attributions averaged over that participant's
// samples (the first `max_samples` sets, all when 0).
struct SubjectAttribution {
  std::string participant_id;
  Group group = Group::C;
  std::size_t n_samples = 0;
  std::array<std::vector<double>, 4> series;
};

SubjectAttribution attribute_subject(const nnet::Network<double>& net, const SampleSource& data,
                                     std::size_t participant, const Participant& who, std::size_t steps = 50,
                                     std::size_t max_samples = 0);

struct AttributionMap {
  Group group = Group::C;
  Sentiment condition = Sentiment::Negative;
  Direction direction = Direction::X;
  std::vector<double> values;  // mean over subjects
  std::vector<double> se;      // standard error over subjects (0 for one subject)
  std::size_t n_samples = 0;
  std::size_t n_subjects = 0;
};

// Mean over subjects within each group, per condition x direction. Throws
// MetricError for a requested group with no subjects.
std::vector<AttributionMap> aggregate_attributions(const std::vector<SubjectAttribution>& subjects);
// Long format: group,condition,direction,t,value,se,n_subjects,n_samples
std::string attribution_csv(const std::vector<AttributionMap>& maps);

// Mean |weight| of the first dense layer over hidden units, split into the
// four T-length input blocks.
std::array<std::vector<double>, 4> fc_weight_readout(const nnet::Network<float>& net);
std::string readout_csv(const std::array<std::vector<double>, 4>& series);

struct DensityMap {
  Group group = Group::C;
  std::size_t nx = 96, ny = 54;
  std::size_t n_subjects = 0;
  std::vector<double> values;  // ny rows of nx bins, row 0 at y = -1; sums to 1

  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

struct DensityConfig {
  double window_ms = 100.0;
  Sentiment condition = Sentiment::Negative;
  std::size_t nx = 96;
  std::size_t ny = 54;
  // Bin over the central [-1/zoom, 1/zoom]^2 instead of [-1,1]^2; 1.2 is a
  // 20% zoom. Samples outside the field are dropped.
  double zoom = 1.0;
};

// Normalized gaze histogram of [response - window, response) per group:
// each subject's histogram is normalized, averaged within the group and
// renormalized. Groups without samples are omitted.
std::vector<DensityMap> fixation_density(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                         const DensityConfig& cfg = {});
// Grid CSV: ny lines of nx comma-separated values.
std::string density_csv(const DensityMap& map);

}  // namespace gazenet
