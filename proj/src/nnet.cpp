#include "gazenet/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "gazenet/simd.hpp"

namespace gazenet::nnet {

// ---------------------------------------------------------------------------
// conv2d_forward
// ---------------------------------------------------------------------------

template <class Real>
Array<Real> conv2d_forward(const Array<Real>& input, const Array<Real>& kernels, std::span<const Real> bias,
                           bool same_padding) {
  if (input.shape.size() != 3 || kernels.shape.size() != 4) throw ModelFault("conv2d: expected CxHxW input and OxIxkxk kernels");
  const std::size_t c_in = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t c_out = kernels.dim(0), k = kernels.dim(2);
  if (kernels.dim(1) != c_in || kernels.dim(3) != k || k % 2 == 0) throw ModelFault("conv2d: kernel shape mismatch");
  if (bias.size() != c_out) throw ModelFault("conv2d: bias size mismatch");
  const std::size_t pad = same_padding ? k / 2 : 0;
  if (!same_padding && (h < k || w < k)) throw ModelFault("conv2d: input smaller than kernel");
  const std::size_t oh = same_padding ? h : h - k + 1;
  const std::size_t ow = same_padding ? w : w - k + 1;
  const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;

  Array<Real> out({c_out, oh, ow});
  for (std::size_t o = 0; o < c_out; ++o) std::fill_n(out.data.data() + o * oh * ow, oh * ow, bias[o]);

  const auto& kt = simd::kernels<Real>();
  std::vector<Real> padded(ph * pw, Real(0));
  std::vector<Real> wslice(c_out * k * k);
  for (std::size_t ci = 0; ci < c_in; ++ci) {
    for (std::size_t r = 0; r < h; ++r) {
      std::memcpy(padded.data() + (r + pad) * pw + pad, input.data.data() + (ci * h + r) * w, w * sizeof(Real));
    }
    for (std::size_t o = 0; o < c_out; ++o) {
      std::memcpy(wslice.data() + o * k * k, kernels.data.data() + (o * c_in + ci) * k * k, k * k * sizeof(Real));
    }
    kt.conv_accumulate(padded.data(), pw, oh, ow, k, wslice.data(), c_out, out.data.data());
  }
  return out;
}

template Array<float> conv2d_forward(const Array<float>&, const Array<float>&, std::span<const float>, bool);
template Array<double> conv2d_forward(const Array<double>&, const Array<double>&, std::span<const double>, bool);

// ---------------------------------------------------------------------------
// Configuration and layout
// ---------------------------------------------------------------------------

std::size_t ModelConfig::max_kernel() const {
  std::size_t k = 0;
  for (auto s : kernel_sizes) k = std::max(k, s);
  return k;
}

void ModelConfig::validate() const {
  if (length == 0 || filters == 0 || hidden == 0) throw ConfigError("model dimensions must be positive");
  if (kernel_sizes.empty()) throw ConfigError("at least one kernel size required");
  for (auto k : kernel_sizes) {
    if (k % 2 == 0) throw ConfigError("kernel sizes must be odd");
  }
}

std::size_t parameter_count(const ModelConfig& cfg) {
  std::size_t sum_k2 = 0;
  for (auto k : cfg.kernel_sizes) sum_k2 += k * k;
  const std::size_t n = cfg.kernel_sizes.size();
  const std::size_t per_backbone = 2 * cfg.filters * sum_k2 + n * (cfg.filters + 1);
  return cfg.backbones() * per_backbone + cfg.hidden * cfg.features() + cfg.hidden + cfg.hidden + 1;
}

std::size_t TensorEntry::size() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

ParamLayout ParamLayout::build(const ModelConfig& cfg) {
  cfg.validate();
  ParamLayout l;
  auto add = [&l](std::string name, std::vector<std::size_t> shape) {
    TensorEntry e{std::move(name), l.total, std::move(shape)};
    l.total += e.size();
    l.tensors.push_back(std::move(e));
    return l.tensors.back().offset;
  };
  static const char* shared_names[] = {"neg", "pos"};
  static const char* split_names[] = {"neg_x", "neg_y", "pos_x", "pos_y"};
  for (std::size_t b = 0; b < cfg.backbones(); ++b) {
    const std::string prefix = cfg.share_directions ? shared_names[b] : split_names[b];
    Backbone bb;
    for (auto k : cfg.kernel_sizes) {
      const auto ks = std::to_string(k);
      bb.first.weight.push_back(add(prefix + ".block1.k" + ks + ".weight", {cfg.filters, 1, k, k}));
      bb.first.bias.push_back(add(prefix + ".block1.k" + ks + ".bias", {cfg.filters}));
    }
    for (auto k : cfg.kernel_sizes) {
      const auto ks = std::to_string(k);
      bb.second.weight.push_back(add(prefix + ".block2.k" + ks + ".weight", {1, cfg.filters, k, k}));
      bb.second.bias.push_back(add(prefix + ".block2.k" + ks + ".bias", {1}));
    }
    l.backbones.push_back(std::move(bb));
  }
  l.fc1_w = add("fc1.weight", {cfg.hidden, cfg.features()});
  l.fc1_b = add("fc1.bias", {cfg.hidden});
  l.fc2_w = add("fc2.weight", {1, cfg.hidden});
  l.fc2_b = add("fc2.bias", {1});
  return l;
}

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

template <class Real>
void Workspace<Real>::ensure(const ModelConfig& cfg, std::size_t r) {
  const std::size_t k = cfg.max_kernel();
  if (rows == r && length == cfg.length && filters == cfg.filters && kernel == k && a1.size() == cfg.hidden) return;
  rows = r;
  length = cfg.length;
  filters = cfg.filters;
  kernel = k;
  const std::size_t T = length, F = filters;
  const std::size_t H = rows + k - 1, W = T + k - 1;
  order.assign(2 * rows, 0);
  pad.assign(4 * H * W, Real(0));
  z1.assign(4 * F * rows * T, Real(0));
  rsum.assign(4 * F * k * W, Real(0));
  feat.assign(4 * T, Real(0));
  a1.assign(cfg.hidden, Real(0));
  h1.assign(cfg.hidden, Real(0));
  h.assign(F * rows * T, Real(0));
  prefix.assign((rows + 1) * T, Real(0));
  gpad.assign(W, Real(0));
  dr.assign((k + 1) * T, Real(0));
  dh.assign(F * rows * T, Real(0));
  dz.assign(F * rows * T, Real(0));
  dfeat.assign(4 * T, Real(0));
  geff.assign(2 * F * k * k, Real(0));
  dpad.assign(F * H * W, Real(0));
  dinput.assign(rows * T, Real(0));
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

template <class Real>
Network<Real>::Network(ModelConfig cfg) : cfg_(std::move(cfg)), layout_(ParamLayout::build(cfg_)) {
  params_.assign(layout_.total, Real(0));
  sync();
}

template <class Real>
std::size_t Network<Real>::backbone_of(std::size_t image) const {
  return cfg_.share_directions ? image / 2 : image;
}

template <class Real>
void Network<Real>::merge_block(const ParamLayout::Block& block, std::size_t n_out, std::vector<Real>& eff,
                                std::vector<Real>& bias) const {
  const std::size_t k = cfg_.max_kernel();
  const std::size_t n_paths = cfg_.kernel_sizes.size();
  const Real inv = Real(1) / static_cast<Real>(n_paths);
  eff.assign(cfg_.filters * k * k, Real(0));
  bias.assign(n_out, Real(0));
  for (std::size_t p = 0; p < n_paths; ++p) {
    const std::size_t ks = cfg_.kernel_sizes[p];
    const std::size_t off = (k - ks) / 2;
    const Real* w = params_.data() + block.weight[p];
    for (std::size_t f = 0; f < cfg_.filters; ++f) {
      for (std::size_t i = 0; i < ks; ++i) {
        for (std::size_t j = 0; j < ks; ++j) {
          eff[(f * k + i + off) * k + j + off] += inv * w[(f * ks + i) * ks + j];
        }
      }
    }
    const Real* b = params_.data() + block.bias[p];
    for (std::size_t o = 0; o < n_out; ++o) bias[o] += inv * b[o];
  }
}

template <class Real>
void Network<Real>::scatter_block(const ParamLayout::Block& block, const Real* geff, const Real* gbias,
                                  std::size_t n_bias, std::span<Real> grad) const {
  const std::size_t k = cfg_.max_kernel();
  const std::size_t n_paths = cfg_.kernel_sizes.size();
  const Real inv = Real(1) / static_cast<Real>(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const std::size_t ks = cfg_.kernel_sizes[p];
    const std::size_t off = (k - ks) / 2;
    Real* g = grad.data() + block.weight[p];
    for (std::size_t f = 0; f < cfg_.filters; ++f) {
      for (std::size_t i = 0; i < ks; ++i) {
        for (std::size_t j = 0; j < ks; ++j) {
          g[(f * ks + i) * ks + j] += inv * geff[(f * k + i + off) * k + j + off];
        }
      }
    }
    Real* gb = grad.data() + block.bias[p];
    for (std::size_t o = 0; o < n_bias; ++o) gb[o] += inv * gbias[o];
  }
}

template <class Real>
void Network<Real>::sync() {
  const std::size_t nb = cfg_.backbones();
  eff1_.resize(nb);
  eff2_.resize(nb);
  bias1_.resize(nb);
  bias2_.assign(nb, Real(0));
  for (std::size_t b = 0; b < nb; ++b) {
    merge_block(layout_.backbones[b].first, cfg_.filters, eff1_[b], bias1_[b]);
    std::vector<Real> b2;
    merge_block(layout_.backbones[b].second, 1, eff2_[b], b2);
    bias2_[b] = b2[0];
  }
  stale_ = false;
}

template <class Real>
void Network<Real>::init(std::uint64_t seed) {
  Rng rng(seed);
  std::fill(params_.begin(), params_.end(), Real(0));
  for (const auto& t : layout_.tensors) {
    if (t.shape.size() < 2) continue;  // biases stay zero
    std::size_t fan_in = 1, fan_out = t.shape[0];
    for (std::size_t d = 1; d < t.shape.size(); ++d) fan_in *= t.shape[d];
    for (std::size_t d = 2; d < t.shape.size(); ++d) fan_out *= t.shape[d];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < t.size(); ++i) params_[t.offset + i] = static_cast<Real>(rng.uniform(-bound, bound));
  }
  sync();
}

namespace {

template <class Real>
bool all_finite(const Real* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

template <class Real>
Real sigmoid(Real z) {
  if (z >= 0) return Real(1) / (Real(1) + std::exp(-z));
  const Real e = std::exp(z);
  return e / (Real(1) + e);
}

}  // namespace

template <class Real>
Real Network<Real>::forward(const Real* neg, const Real* pos, std::size_t rows, Workspace<Real>& ws) const {
  if (stale_) throw ModelFault("network parameters changed without sync()");
  ws.ensure(cfg_, rows);
  const auto& kt = *kt_;
  const std::size_t T = cfg_.length, F = cfg_.filters, k = cfg_.max_kernel(), P = k / 2;
  const std::size_t H = rows + k - 1, W = T + k - 1;
  const std::size_t plane = rows * T;
  const Real inv_rows = Real(1) / static_cast<Real>(rows);

  for (std::size_t branch = 0; branch < 2; ++branch) {
    const Real* set = branch == 0 ? neg : pos;
    if (!all_finite(set, 2 * plane)) throw ModelFault("non-finite input");
    std::size_t* ord = ws.order.data() + branch * rows;
    std::iota(ord, ord + rows, std::size_t{0});
    std::sort(ord, ord + rows, [&](std::size_t a, std::size_t b) {
      for (std::size_t d = 0; d < 2; ++d) {
        const Real* ra = set + d * plane + a * T;
        const Real* rb = set + d * plane + b * T;
        const auto m = std::mismatch(ra, ra + T, rb);
        if (m.first != ra + T) return *m.first < *m.second;
      }
      return false;
    });
  }

  for (std::size_t img = 0; img < 4; ++img) {
    const std::size_t bb = backbone_of(img);
    const Real* src = (img < 2 ? neg : pos) + (img % 2) * plane;
    const std::size_t* ord = ws.order.data() + (img / 2) * rows;
    Real* pad = ws.pad.data() + img * H * W;
    for (std::size_t r = 0; r < rows; ++r) std::memcpy(pad + (r + P) * W + P, src + ord[r] * T, T * sizeof(Real));

    Real* z1 = ws.z1.data() + img * F * plane;
    for (std::size_t f = 0; f < F; ++f) std::fill_n(z1 + f * plane, plane, bias1_[bb][f]);
    kt.conv_accumulate(pad, W, rows, T, k, eff1_[bb].data(), F, z1);
    kt.gelu_forward(z1, ws.h.data(), F * plane);

    // Row-range sums R_off = sum of GELU rows feeding output rows through
    // kernel row offset off; the second block then reduces to 1D filtering.
    Real* rs = ws.rsum.data() + img * F * k * W;
    for (std::size_t f = 0; f < F; ++f) {
      const Real* hf = ws.h.data() + f * plane;
      Real* pre = ws.prefix.data();
      std::fill_n(pre, T, Real(0));
      for (std::size_t s = 0; s < rows; ++s) {
        for (std::size_t t = 0; t < T; ++t) pre[(s + 1) * T + t] = pre[s * T + t] + hf[s * T + t];
      }
      for (std::size_t ai = 0; ai < k; ++ai) {
        const long long off = static_cast<long long>(ai) - static_cast<long long>(P);
        const long long lo = std::max<long long>(0, off);
        const long long hi = std::min<long long>(static_cast<long long>(rows), static_cast<long long>(rows) + off);
        Real* dst = rs + (f * k + ai) * W + P;
        if (lo >= hi) {
          std::fill_n(dst, T, Real(0));
          continue;
        }
        const Real* top = pre + static_cast<std::size_t>(hi) * T;
        const Real* bot = pre + static_cast<std::size_t>(lo) * T;
        for (std::size_t t = 0; t < T; ++t) dst[t] = top[t] - bot[t];
      }
    }

    Real* m = ws.feat.data() + img * T;
    std::fill_n(m, T, bias2_[bb]);
    const Real* e2 = eff2_[bb].data();
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t ai = 0; ai < k; ++ai) {
        const Real* row = rs + (f * k + ai) * W;
        for (std::size_t c = 0; c < k; ++c) {
          const Real w = e2[(f * k + ai) * k + c];
          if (w != Real(0)) kt.axpy(w * inv_rows, row + c, m, T);
        }
      }
    }
  }
  if (!all_finite(ws.feat.data(), ws.feat.size())) throw ModelFault("non-finite output in backbone (inception blocks)");

  const std::size_t nf = cfg_.features();
  const Real* w1 = params_.data() + layout_.fc1_w;
  const Real* b1 = params_.data() + layout_.fc1_b;
  for (std::size_t j = 0; j < cfg_.hidden; ++j) {
    ws.a1[j] = b1[j] + kt.dot(w1 + j * nf, ws.feat.data(), nf);
    ws.h1[j] = ws.a1[j] > Real(0) ? ws.a1[j] : Real(0);
  }
  if (!all_finite(ws.a1.data(), ws.a1.size())) throw ModelFault("non-finite output in fc1");
  ws.logit = params_[layout_.fc2_b] + kt.dot(params_.data() + layout_.fc2_w, ws.h1.data(), cfg_.hidden);
  if (!std::isfinite(ws.logit)) throw ModelFault("non-finite output in fc2");
  ws.prob = sigmoid(ws.logit);
  return ws.prob;
}

template <class Real>
void Network<Real>::backward(Workspace<Real>& ws, Real dlogit, std::span<Real> grad, Real* dneg, Real* dpos) const {
  if (stale_) throw ModelFault("network parameters changed without sync()");
  const bool want_params = !grad.empty();
  if (want_params && grad.size() != params_.size()) throw ModelFault("gradient buffer size mismatch");
  const auto& kt = *kt_;
  const std::size_t rows = ws.rows;
  const std::size_t T = cfg_.length, F = cfg_.filters, k = cfg_.max_kernel(), P = k / 2;
  const std::size_t H = rows + k - 1, W = T + k - 1;
  const std::size_t plane = rows * T;
  const std::size_t nf = cfg_.features();
  const Real inv_rows = Real(1) / static_cast<Real>(rows);

  // Dense head.
  const Real* w1 = params_.data() + layout_.fc1_w;
  const Real* w2 = params_.data() + layout_.fc2_w;
  if (want_params) grad[layout_.fc2_b] += dlogit;
  std::fill(ws.dfeat.begin(), ws.dfeat.end(), Real(0));
  for (std::size_t j = 0; j < cfg_.hidden; ++j) {
    if (want_params) grad[layout_.fc2_w + j] += dlogit * ws.h1[j];
    const Real da = ws.a1[j] > Real(0) ? dlogit * w2[j] : Real(0);
    if (da == Real(0)) continue;
    if (want_params) {
      grad[layout_.fc1_b + j] += da;
      kt.axpy(da, ws.feat.data(), grad.data() + layout_.fc1_w + j * nf, nf);
    }
    kt.axpy(da, w1 + j * nf, ws.dfeat.data(), nf);
  }

  for (std::size_t img = 0; img < 4; ++img) {
    const std::size_t bb = backbone_of(img);
    const Real* g = ws.dfeat.data() + img * T;
    const Real* rs = ws.rsum.data() + img * F * k * W;
    const Real* e2 = eff2_[bb].data();
    Real* geff1 = ws.geff.data();
    Real* geff2 = ws.geff.data() + F * k * k;

    // Second block (fused with the trial mean).
    Real gbias2 = 0;
    if (want_params) {
      for (std::size_t t = 0; t < T; ++t) gbias2 += g[t];
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t ai = 0; ai < k; ++ai) {
          const Real* row = rs + (f * k + ai) * W;
          for (std::size_t c = 0; c < k; ++c) geff2[(f * k + ai) * k + c] = inv_rows * kt.dot(g, row + c, T);
        }
      }
    }
    std::fill(ws.gpad.begin(), ws.gpad.end(), Real(0));
    std::memcpy(ws.gpad.data() + P, g, T * sizeof(Real));

    for (std::size_t f = 0; f < F; ++f) {
      // dR_off[t'] = (1/rows) sum_c E2[off][c] g[t' - c + P], one row per offset
      Real* dr = ws.dr.data();
      std::fill_n(dr, (k + 1) * T, Real(0));
      for (std::size_t ai = 0; ai < k; ++ai) {
        for (std::size_t c = 0; c < k; ++c) {
          const Real w = e2[(f * k + ai) * k + (k - 1 - c)];
          if (w != Real(0)) kt.axpy(w * inv_rows, ws.gpad.data() + c, dr + ai * T, T);
        }
      }
      Real* full = dr + k * T;
      for (std::size_t ai = 0; ai < k; ++ai) kt.axpy(Real(1), dr + ai * T, full, T);
      Real* dhf = ws.dh.data() + f * plane;
      for (std::size_t s = 0; s < rows; ++s) {
        const long long ls = static_cast<long long>(s);
        const long long lo = std::max<long long>(-static_cast<long long>(P), ls - static_cast<long long>(rows - 1));
        const long long hi = std::min<long long>(static_cast<long long>(P), ls);
        Real* dst = dhf + s * T;
        if (lo == -static_cast<long long>(P) && hi == static_cast<long long>(P)) {
          std::memcpy(dst, full, T * sizeof(Real));
          continue;
        }
        std::fill_n(dst, T, Real(0));
        for (long long off = lo; off <= hi; ++off) {
          kt.axpy(Real(1), dr + static_cast<std::size_t>(off + static_cast<long long>(P)) * T, dst, T);
        }
      }
    }

    // GELU and first block.
    const Real* z1 = ws.z1.data() + img * F * plane;
    kt.gelu_backward(z1, ws.dh.data(), ws.dz.data(), F * plane);
    if (want_params) {
      std::vector<Real> gbias1(F, Real(0));
      for (std::size_t f = 0; f < F; ++f) {
        const Real* dzf = ws.dz.data() + f * plane;
        Real s = 0;
        for (std::size_t i = 0; i < plane; ++i) s += dzf[i];
        gbias1[f] = s;
      }
      std::fill_n(geff1, F * k * k, Real(0));
      const Real* pad = ws.pad.data() + img * H * W;
      kt.corr_accumulate(pad, W, rows, T, k, ws.dz.data(), F, geff1);
      scatter_block(layout_.backbones[bb].first, geff1, gbias1.data(), F, grad);
      scatter_block(layout_.backbones[bb].second, geff2, &gbias2, 1, grad);
    }

    Real* dinput = img < 2 ? dneg : dpos;
    if (dinput) {
      Real* dst = ws.dinput.data();
      std::fill_n(dst, plane, Real(0));
      const Real* e1 = eff1_[bb].data();
      std::vector<Real> flipped(k * k);
      for (std::size_t f = 0; f < F; ++f) {
        Real* dp = ws.dpad.data() + f * H * W;
        for (std::size_t s = 0; s < rows; ++s) {
          std::memcpy(dp + (s + P) * W + P, ws.dz.data() + f * plane + s * T, T * sizeof(Real));
        }
        for (std::size_t i = 0; i < k * k; ++i) flipped[i] = e1[f * k * k + (k * k - 1 - i)];
        kt.conv_accumulate(dp, W, rows, T, k, flipped.data(), 1, dst);
      }
      const std::size_t* ord = ws.order.data() + (img / 2) * rows;
      Real* out = dinput + (img % 2) * plane;
      for (std::size_t r = 0; r < rows; ++r) std::memcpy(out + ord[r] * T, dst + r * T, T * sizeof(Real));
    }
  }
}

template class Network<float>;
template class Network<double>;
template struct Workspace<float>;
template struct Workspace<double>;

// ---------------------------------------------------------------------------
// Loss, class weights, optimizer
// ---------------------------------------------------------------------------

double bce_loss(double p, int label, double weight) {
  const double q = std::clamp(p, 1e-7, 1.0 - 1e-7);
  return -weight * (label == 1 ? std::log(q) : std::log(1.0 - q));
}

double bce_dlogit(double p, int label, double weight) { return weight * (p - static_cast<double>(label)); }

ClassWeights ClassWeights::from_counts(std::size_t n_negative, std::size_t n_positive) {
  if (n_negative == 0 || n_positive == 0) throw ConfigError("class weights need both classes in the training set");
  const double n = static_cast<double>(n_negative + n_positive);
  return {n / (2.0 * static_cast<double>(n_negative)), n / (2.0 * static_cast<double>(n_positive))};
}

template <class Real>
void Adam<Real>::step(std::span<Real> params, std::span<const Real> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ModelFault("optimizer size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = static_cast<double>(grad[i]);
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] = static_cast<Real>(static_cast<double>(params[i]) - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
  }
}

template class Adam<float>;
template class Adam<double>;

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw IngestError(path + ": truncated checkpoint");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Network<float>& net) {
  std::string out = "GZNP";
  put<std::uint32_t>(out, 1);
  const auto& l = net.layout();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(l.tensors.size()));
  for (const auto& t : l.tensors) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out += t.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  }
  const auto p = net.params();
  out.append(reinterpret_cast<const char*>(p.data()), p.size() * sizeof(float));
  write_file(path, out);
}

Network<float> read_checkpoint(const std::string& path, const ModelConfig& cfg) {
  const std::string in = read_file(path);
  if (in.size() < 4 || in.compare(0, 4, "GZNP") != 0) throw IngestError(path + ": not a checkpoint");
  std::size_t pos = 4;
  if (get<std::uint32_t>(in, pos, path) != 1) throw IngestError(path + ": unsupported checkpoint version");
  Network<float> net(cfg);
  const auto& l = net.layout();
  const auto n = get<std::uint32_t>(in, pos, path);
  if (n != l.tensors.size()) throw IngestError(path + ": tensor count does not match the model configuration");
  for (const auto& t : l.tensors) {
    const auto len = get<std::uint16_t>(in, pos, path);
    if (pos + len > in.size() || in.compare(pos, len, t.name) != 0) throw IngestError(path + ": tensor name mismatch");
    pos += len;
    const auto rank = get<std::uint32_t>(in, pos, path);
    if (rank != t.shape.size()) throw IngestError(path + ": rank mismatch for " + t.name);
    for (auto d : t.shape) {
      if (get<std::uint32_t>(in, pos, path) != d) throw IngestError(path + ": shape mismatch for " + t.name);
    }
  }
  auto p = net.mutable_params();
  if (pos + p.size() * sizeof(float) != in.size()) throw IngestError(path + ": payload size mismatch");
  std::memcpy(p.data(), in.data() + pos, p.size() * sizeof(float));
  net.sync();
  return net;
}

}  // namespace gazenet::nnet
