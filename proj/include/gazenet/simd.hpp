#pragma once

#include <cstddef>
#include <string_view>

namespace gazenet::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

// Inner loops of the network. All image buffers are row-major.
//
// conv_accumulate: for f < n_filters, r < rows, t < cols
//   out[f][r][t] += sum_{a,c < k} w[f][a][c] * in[(r + a) * stride + t + c]
// where `in` points at the top-left corner of a zero-padded image (padding
// k/2 on every side), so output (0,0) sees the k x k neighbourhood at `in`.
//
// corr_accumulate: the matching weight gradient
//   grad[f][a][c] += sum_{r,t} dout[f][r][t] * in[(r + a) * stride + t + c]
//
// gelu_backward writes dz = dh * gelu'(z).
template <class Real>
struct KernelTable {
  Isa isa = Isa::Scalar;
  void (*conv_accumulate)(const Real* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                          const Real* w, std::size_t n_filters, Real* out) = nullptr;
  void (*corr_accumulate)(const Real* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                          const Real* dout, std::size_t n_filters, Real* grad) = nullptr;
  void (*gelu_forward)(const Real* z, Real* h, std::size_t n) = nullptr;
  void (*gelu_backward)(const Real* z, const Real* dh, Real* dz, std::size_t n) = nullptr;
  Real (*dot)(const Real* a, const Real* b, std::size_t n) = nullptr;
  void (*axpy)(Real alpha, const Real* x, Real* y, std::size_t n) = nullptr;
};

const KernelTable<float>& scalar_float_kernels();
const KernelTable<double>& scalar_double_kernels();
// nullptr when the AVX2 variant was not compiled in.
const KernelTable<float>* avx2_float_kernels();

bool cpu_supports_avx2();

// Best table for this CPU. Setting GAZENET_SIMD=scalar in the environment
// forces the scalar reference.
const KernelTable<float>& active_float_kernels();

template <class Real>
const KernelTable<Real>& kernels();
template <>
inline const KernelTable<float>& kernels<float>() {
  return active_float_kernels();
}
template <>
inline const KernelTable<double>& kernels<double>() {
  return scalar_double_kernels();
}

}  // namespace gazenet::simd
