#pragma once

// Scalar reference kernels, shared by the float and double tables.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>

namespace gazenet::simd::ref {

template <class Real>
void conv_accumulate(const Real* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                     const Real* w, std::size_t n_filters, Real* out) {
  for (std::size_t f = 0; f < n_filters; ++f) {
    const Real* wf = w + f * k * k;
    Real* of = out + f * rows * cols;
    for (std::size_t r = 0; r < rows; ++r) {
      Real* orow = of + r * cols;
      for (std::size_t a = 0; a < k; ++a) {
        const Real* irow = in + (r + a) * stride;
        for (std::size_t c = 0; c < k; ++c) {
          const Real wv = wf[a * k + c];
          const Real* src = irow + c;
          for (std::size_t t = 0; t < cols; ++t) orow[t] += wv * src[t];
        }
      }
    }
  }
}

template <class Real>
void corr_accumulate(const Real* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                     const Real* dout, std::size_t n_filters, Real* grad) {
  for (std::size_t f = 0; f < n_filters; ++f) {
    const Real* df = dout + f * rows * cols;
    Real* gf = grad + f * k * k;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t c = 0; c < k; ++c) {
        Real acc = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          const Real* drow = df + r * cols;
          const Real* src = in + (r + a) * stride + c;
          for (std::size_t t = 0; t < cols; ++t) acc += drow[t] * src[t];
        }
        gf[a * k + c] += acc;
      }
    }
  }
}

template <class Real>
Real dot(const Real* a, const Real* b, std::size_t n) {
  Real acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <class Real>
void axpy(Real alpha, const Real* x, Real* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Exact GELU for the 64-bit path.
inline void gelu_forward_exact(const double* z, double* h, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) h[i] = 0.5 * z[i] * (1.0 + std::erf(z[i] * 0.70710678118654752440));
}

inline void gelu_backward_exact(const double* z, const double* dh, double* dz, std::size_t n) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = 0.5 * (1.0 + std::erf(z[i] * 0.70710678118654752440));
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * z[i] * z[i]);
    dz[i] = dh[i] * (cdf + z[i] * pdf);
  }
}

// 32-bit GELU. erf from the five-term rational approximation (max abs error
// 1.5e-7) and a Cephes-style exp; the AVX2 variant evaluates the same formulas
// lane by lane.
namespace fast {

inline constexpr float kExpHi = 88.3762626647949f;
inline constexpr float kExpLo = -88.3762626647949f;
inline constexpr float kLog2e = 1.44269504088896341f;
inline constexpr float kLn2Hi = 0.693359375f;
inline constexpr float kLn2Lo = -2.12194440e-4f;
inline constexpr float kP0 = 1.9875691500e-4f;
inline constexpr float kP1 = 1.3981999507e-3f;
inline constexpr float kP2 = 8.3334519073e-3f;
inline constexpr float kP3 = 4.1665795894e-2f;
inline constexpr float kP4 = 1.6666665459e-1f;
inline constexpr float kP5 = 5.0000001201e-1f;

inline constexpr float kErfP = 0.3275911f;
inline constexpr float kA1 = 0.254829592f;
inline constexpr float kA2 = -0.284496736f;
inline constexpr float kA3 = 1.421413741f;
inline constexpr float kA4 = -1.453152027f;
inline constexpr float kA5 = 1.061405429f;
inline constexpr float kInvSqrt2 = 0.70710678118654752440f;
inline constexpr float kInvSqrt2Pi = 0.39894228040143267794f;

inline float exp(float x) {
  x = x > kExpHi ? kExpHi : (x < kExpLo ? kExpLo : x);
  float fx = std::floor(x * kLog2e + 0.5f);
  x = x - fx * kLn2Hi;
  x = x - fx * kLn2Lo;
  float y = kP0;
  y = y * x + kP1;
  y = y * x + kP2;
  y = y * x + kP3;
  y = y * x + kP4;
  y = y * x + kP5;
  y = y * (x * x) + x + 1.0f;
  std::int32_t e = (static_cast<std::int32_t>(fx) + 127) << 23;
  float scale;
  std::memcpy(&scale, &e, sizeof(scale));
  return y * scale;
}

// Returns Phi(z) and writes exp(-z^2/2) to *gauss.
inline float normal_cdf(float z, float* gauss) {
  const float u = std::fabs(z) * kInvSqrt2;
  const float t = 1.0f / (1.0f + kErfP * u);
  float poly = kA5;
  poly = poly * t + kA4;
  poly = poly * t + kA3;
  poly = poly * t + kA2;
  poly = poly * t + kA1;
  poly = poly * t;
  const float e = exp(-u * u);
  *gauss = e;
  const float erf_abs = 1.0f - poly * e;
  const float erf_signed = z < 0.0f ? -erf_abs : erf_abs;
  return 0.5f * (1.0f + erf_signed);
}

inline void gelu_forward(const float* z, float* h, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float g;
    h[i] = z[i] * normal_cdf(z[i], &g);
  }
}

inline void gelu_backward(const float* z, const float* dh, float* dz, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float g;
    const float cdf = normal_cdf(z[i], &g);
    dz[i] = dh[i] * (cdf + z[i] * kInvSqrt2Pi * g);
  }
}

}  // namespace fast

}  // namespace gazenet::simd::ref
