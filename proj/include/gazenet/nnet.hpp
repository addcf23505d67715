#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gazenet/common.hpp"
#include "gazenet/simd.hpp"

namespace gazenet::nnet {

// Dense row-major array of up to four dimensions.
template <class Real>
struct Array {
  std::vector<std::size_t> shape;
  std::vector<Real> data;

  Array() = default;
  explicit Array(std::vector<std::size_t> dims) : shape(std::move(dims)) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    data.assign(n, Real(0));
  }
  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
};

// Plain multi-channel 2D cross-correlation with zero padding:
//   input  C_in x H x W, kernels C_out x C_in x k x k (k odd), bias C_out
//   same_padding: output C_out x H x W; otherwise the valid H-k+1 x W-k+1 region.
template <class Real>
Array<Real> conv2d_forward(const Array<Real>& input, const Array<Real>& kernels, std::span<const Real> bias,
                           bool same_padding = true);

struct ModelConfig {
  std::size_t length = 300;  // samples per trial (T)
  std::size_t filters = 8;   // F, channels between the two inception blocks
  std::size_t hidden = 64;
  bool share_directions = true;  // x and y share one backbone within a branch
  std::vector<std::size_t> kernel_sizes{1, 3, 5, 7, 9, 11};

  std::size_t max_kernel() const;
  std::size_t backbones() const { return share_directions ? 2 : 4; }
  std::size_t features() const { return 4 * length; }
  void validate() const;
};

// Closed form: backbones * sum_k (F k^2 + F k^2) + backbones * 6 (F + 1)
//              + hidden * 4T + hidden + hidden + 1
std::size_t parameter_count(const ModelConfig& cfg);

struct TensorEntry {
  std::string name;
  std::size_t offset = 0;
  std::vector<std::size_t> shape;
  std::size_t size() const;
};

// Every parameter lives in one flat vector; gradients and optimizer moments
// share the same layout.
struct ParamLayout {
  struct Block {
    std::vector<std::size_t> weight;  // per kernel size: out x in x k x k
    std::vector<std::size_t> bias;    // per kernel size: out
  };
  struct Backbone {
    Block first;   // 1 -> F
    Block second;  // F -> 1
  };

  std::vector<TensorEntry> tensors;
  std::vector<Backbone> backbones;
  std::size_t fc1_w = 0, fc1_b = 0, fc2_w = 0, fc2_b = 0;
  std::size_t total = 0;

  static ParamLayout build(const ModelConfig& cfg);
};

template <class Real>
struct Workspace;

// Two-branch network: one backbone per sentiment condition (two inception
// blocks, 1 -> F -> 1 channels, GELU between), applied to each direction's
// set_size x T image, averaged over the trial axis; the four T-vectors are
// concatenated as [neg-x, neg-y, pos-x, pos-y] into a dense 4T -> hidden
// layer (ReLU) and a hidden -> 1 logit (sigmoid).
//
// Inputs are sets laid out 2 x rows x T (all x rows, then all y rows).
// Within each branch the trials are first put in a canonical order (sorted by
// their x then y samples), so P depends only on the multiset of trials even
// though the convolutions span neighbouring trials.
template <class Real>
class Network {
 public:
  explicit Network(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  const ParamLayout& layout() const { return layout_; }
  std::span<const Real> params() const { return params_; }
  // Marks derived weights stale; call sync() before the next forward.
  std::span<Real> mutable_params() {
    stale_ = true;
    return params_;
  }
  void sync();

  // Uniform +-sqrt(6 / (fan_in + fan_out)) per tensor, zero biases.
  void init(std::uint64_t seed);

  // Returns P(positive). Throws ModelFault naming the layer on non-finite values.
  Real forward(const Real* neg, const Real* pos, std::size_t rows, Workspace<Real>& ws) const;

  // Backpropagates d(objective)/d(logit) through the pass recorded in ws.
  // Parameter gradients are accumulated into `grad` when it is non-empty;
  // input gradients are written to dneg/dpos when given.
  void backward(Workspace<Real>& ws, Real dlogit, std::span<Real> grad, Real* dneg = nullptr,
                Real* dpos = nullptr) const;

  template <class Other>
  Network<Other> cast() const {
    Network<Other> out(cfg_);
    auto dst = out.mutable_params();
    for (std::size_t i = 0; i < params_.size(); ++i) dst[i] = static_cast<Other>(params_[i]);
    out.sync();
    return out;
  }

  // Merged per-backbone kernels (mean of the zero-padded parallel kernels).
  const std::vector<Real>& merged_first(std::size_t backbone) const { return eff1_[backbone]; }
  const std::vector<Real>& merged_second(std::size_t backbone) const { return eff2_[backbone]; }

  // Inner-loop table; defaults to the best one for this CPU.
  void set_kernels(const simd::KernelTable<Real>& table) { kt_ = &table; }
  const simd::KernelTable<Real>& kernels() const { return *kt_; }

 private:
  std::size_t backbone_of(std::size_t image) const;
  void merge_block(const ParamLayout::Block& block, std::size_t n_out_per_path, std::vector<Real>& eff,
                   std::vector<Real>& bias) const;
  void scatter_block(const ParamLayout::Block& block, const Real* geff, const Real* gbias, std::size_t n_filters,
                     std::span<Real> grad) const;

  ModelConfig cfg_;
  ParamLayout layout_;
  std::vector<Real> params_;
  bool stale_ = true;
  std::vector<std::vector<Real>> eff1_, eff2_, bias1_;
  std::vector<Real> bias2_;
  const simd::KernelTable<Real>* kt_ = &simd::kernels<Real>();
};

template <class Real>
struct Workspace {
  std::size_t rows = 0;
  std::size_t length = 0;
  std::size_t filters = 0;
  std::size_t kernel = 0;
  std::vector<std::size_t> order;  // 2 x rows: source trial of each canonical row, per branch
  std::vector<Real> pad;    // 4 x (rows + k - 1) x (T + k - 1)
  std::vector<Real> z1;     // 4 x F x rows x T, pre-GELU
  std::vector<Real> rsum;   // 4 x F x k x (T + k - 1), zero-padded row-range sums of the GELU output
  std::vector<Real> feat;   // 4T
  std::vector<Real> a1;     // hidden, pre-ReLU
  std::vector<Real> h1;     // hidden
  Real logit = 0;
  Real prob = 0;
  // scratch
  std::vector<Real> h, prefix, gpad, dr, dh, dz, dfeat, geff, dpad, dinput;

  void ensure(const ModelConfig& cfg, std::size_t rows);
};

// Weighted binary cross-entropy with P clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int label, double weight);
// d loss / d logit for the same objective (unclamped): weight * (P - label).
double bce_dlogit(double p, int label, double weight);

// Inverse class frequency: w_c = N / (2 N_c).
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  double of(int label) const { return label == 1 ? positive : negative; }
  static ClassWeights from_counts(std::size_t n_negative, std::size_t n_positive);
};

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class Real>
class Adam {
 public:
  Adam(std::size_t n, AdamConfig cfg = {}) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}
  // In-place update of `params` with bias-corrected moments.
  void step(std::span<Real> params, std::span<const Real> grad);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

// Checkpoint: "GZNP" | u32 version | u32 n_tensors | per tensor: u16 name_len,
// name, u32 rank, u32 dims[rank] | then every tensor's f32 values in layout
// order (row-major). Metadata travels in a JSON sidecar.
void write_checkpoint(const std::string& path, const Network<float>& net);
Network<float> read_checkpoint(const std::string& path, const ModelConfig& cfg);

}  // namespace gazenet::nnet
