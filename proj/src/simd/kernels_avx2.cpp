// AVX2 + FMA variants of the float kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; it is reached through the dispatch
// table only after a CPUID check.

#include <immintrin.h>

#include <cstddef>

#include "gazenet/simd.hpp"
#include "kernels_ref.hpp"

namespace gazenet::simd {

namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehdup_ps(lo);
  __m128 s = _mm_add_ps(lo, sh);
  sh = _mm_movehl_ps(sh, s);
  s = _mm_add_ss(s, sh);
  return _mm_cvtss_f32(s);
}

// Four filters x three 8-wide column blocks per inner step (12 accumulators).
void conv_accumulate_avx2(const float* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                          const float* w, std::size_t n_filters, float* out) {
  const std::size_t plane = rows * cols;
  std::size_t f0 = 0;
  for (; f0 + 4 <= n_filters; f0 += 4) {
    const float* w0 = w + (f0 + 0) * k * k;
    const float* w1 = w + (f0 + 1) * k * k;
    const float* w2 = w + (f0 + 2) * k * k;
    const float* w3 = w + (f0 + 3) * k * k;
    float* o0 = out + (f0 + 0) * plane;
    float* o1 = out + (f0 + 1) * plane;
    float* o2 = out + (f0 + 2) * plane;
    float* o3 = out + (f0 + 3) * plane;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t ro = r * cols;
      std::size_t t = 0;
      for (; t + 24 <= cols; t += 24) {
        __m256 a00 = _mm256_loadu_ps(o0 + ro + t), a01 = _mm256_loadu_ps(o0 + ro + t + 8),
               a02 = _mm256_loadu_ps(o0 + ro + t + 16);
        __m256 a10 = _mm256_loadu_ps(o1 + ro + t), a11 = _mm256_loadu_ps(o1 + ro + t + 8),
               a12 = _mm256_loadu_ps(o1 + ro + t + 16);
        __m256 a20 = _mm256_loadu_ps(o2 + ro + t), a21 = _mm256_loadu_ps(o2 + ro + t + 8),
               a22 = _mm256_loadu_ps(o2 + ro + t + 16);
        __m256 a30 = _mm256_loadu_ps(o3 + ro + t), a31 = _mm256_loadu_ps(o3 + ro + t + 8),
               a32 = _mm256_loadu_ps(o3 + ro + t + 16);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          const std::size_t wo = a * k;
          for (std::size_t c = 0; c < k; ++c) {
            const __m256 v0 = _mm256_loadu_ps(src + c);
            const __m256 v1 = _mm256_loadu_ps(src + c + 8);
            const __m256 v2 = _mm256_loadu_ps(src + c + 16);
            __m256 b = _mm256_broadcast_ss(w0 + wo + c);
            a00 = _mm256_fmadd_ps(b, v0, a00);
            a01 = _mm256_fmadd_ps(b, v1, a01);
            a02 = _mm256_fmadd_ps(b, v2, a02);
            b = _mm256_broadcast_ss(w1 + wo + c);
            a10 = _mm256_fmadd_ps(b, v0, a10);
            a11 = _mm256_fmadd_ps(b, v1, a11);
            a12 = _mm256_fmadd_ps(b, v2, a12);
            b = _mm256_broadcast_ss(w2 + wo + c);
            a20 = _mm256_fmadd_ps(b, v0, a20);
            a21 = _mm256_fmadd_ps(b, v1, a21);
            a22 = _mm256_fmadd_ps(b, v2, a22);
            b = _mm256_broadcast_ss(w3 + wo + c);
            a30 = _mm256_fmadd_ps(b, v0, a30);
            a31 = _mm256_fmadd_ps(b, v1, a31);
            a32 = _mm256_fmadd_ps(b, v2, a32);
          }
        }
        _mm256_storeu_ps(o0 + ro + t, a00);
        _mm256_storeu_ps(o0 + ro + t + 8, a01);
        _mm256_storeu_ps(o0 + ro + t + 16, a02);
        _mm256_storeu_ps(o1 + ro + t, a10);
        _mm256_storeu_ps(o1 + ro + t + 8, a11);
        _mm256_storeu_ps(o1 + ro + t + 16, a12);
        _mm256_storeu_ps(o2 + ro + t, a20);
        _mm256_storeu_ps(o2 + ro + t + 8, a21);
        _mm256_storeu_ps(o2 + ro + t + 16, a22);
        _mm256_storeu_ps(o3 + ro + t, a30);
        _mm256_storeu_ps(o3 + ro + t + 8, a31);
        _mm256_storeu_ps(o3 + ro + t + 16, a32);
      }
      for (; t + 8 <= cols; t += 8) {
        __m256 a0 = _mm256_loadu_ps(o0 + ro + t), a1 = _mm256_loadu_ps(o1 + ro + t);
        __m256 a2 = _mm256_loadu_ps(o2 + ro + t), a3 = _mm256_loadu_ps(o3 + ro + t);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          const std::size_t wo = a * k;
          for (std::size_t c = 0; c < k; ++c) {
            const __m256 v = _mm256_loadu_ps(src + c);
            a0 = _mm256_fmadd_ps(_mm256_broadcast_ss(w0 + wo + c), v, a0);
            a1 = _mm256_fmadd_ps(_mm256_broadcast_ss(w1 + wo + c), v, a1);
            a2 = _mm256_fmadd_ps(_mm256_broadcast_ss(w2 + wo + c), v, a2);
            a3 = _mm256_fmadd_ps(_mm256_broadcast_ss(w3 + wo + c), v, a3);
          }
        }
        _mm256_storeu_ps(o0 + ro + t, a0);
        _mm256_storeu_ps(o1 + ro + t, a1);
        _mm256_storeu_ps(o2 + ro + t, a2);
        _mm256_storeu_ps(o3 + ro + t, a3);
      }
      for (; t < cols; ++t) {
        float s0 = o0[ro + t], s1 = o1[ro + t], s2 = o2[ro + t], s3 = o3[ro + t];
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          for (std::size_t c = 0; c < k; ++c) {
            s0 += w0[a * k + c] * src[c];
            s1 += w1[a * k + c] * src[c];
            s2 += w2[a * k + c] * src[c];
            s3 += w3[a * k + c] * src[c];
          }
        }
        o0[ro + t] = s0;
        o1[ro + t] = s1;
        o2[ro + t] = s2;
        o3[ro + t] = s3;
      }
    }
  }
  // A pair of filters, four column blocks per step.
  for (; f0 + 2 <= n_filters; f0 += 2) {
    const float* w0 = w + f0 * k * k;
    const float* w1 = w0 + k * k;
    float* o0 = out + f0 * plane;
    float* o1 = o0 + plane;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t ro = r * cols;
      std::size_t t = 0;
      for (; t + 32 <= cols; t += 32) {
        __m256 a00 = _mm256_loadu_ps(o0 + ro + t), a01 = _mm256_loadu_ps(o0 + ro + t + 8),
               a02 = _mm256_loadu_ps(o0 + ro + t + 16), a03 = _mm256_loadu_ps(o0 + ro + t + 24);
        __m256 a10 = _mm256_loadu_ps(o1 + ro + t), a11 = _mm256_loadu_ps(o1 + ro + t + 8),
               a12 = _mm256_loadu_ps(o1 + ro + t + 16), a13 = _mm256_loadu_ps(o1 + ro + t + 24);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          const std::size_t wo = a * k;
          for (std::size_t c = 0; c < k; ++c) {
            const __m256 v0 = _mm256_loadu_ps(src + c);
            const __m256 v1 = _mm256_loadu_ps(src + c + 8);
            const __m256 v2 = _mm256_loadu_ps(src + c + 16);
            const __m256 v3 = _mm256_loadu_ps(src + c + 24);
            __m256 b = _mm256_broadcast_ss(w0 + wo + c);
            a00 = _mm256_fmadd_ps(b, v0, a00);
            a01 = _mm256_fmadd_ps(b, v1, a01);
            a02 = _mm256_fmadd_ps(b, v2, a02);
            a03 = _mm256_fmadd_ps(b, v3, a03);
            b = _mm256_broadcast_ss(w1 + wo + c);
            a10 = _mm256_fmadd_ps(b, v0, a10);
            a11 = _mm256_fmadd_ps(b, v1, a11);
            a12 = _mm256_fmadd_ps(b, v2, a12);
            a13 = _mm256_fmadd_ps(b, v3, a13);
          }
        }
        _mm256_storeu_ps(o0 + ro + t, a00);
        _mm256_storeu_ps(o0 + ro + t + 8, a01);
        _mm256_storeu_ps(o0 + ro + t + 16, a02);
        _mm256_storeu_ps(o0 + ro + t + 24, a03);
        _mm256_storeu_ps(o1 + ro + t, a10);
        _mm256_storeu_ps(o1 + ro + t + 8, a11);
        _mm256_storeu_ps(o1 + ro + t + 16, a12);
        _mm256_storeu_ps(o1 + ro + t + 24, a13);
      }
      for (; t + 8 <= cols; t += 8) {
        __m256 a0 = _mm256_loadu_ps(o0 + ro + t), a1 = _mm256_loadu_ps(o1 + ro + t);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          const std::size_t wo = a * k;
          for (std::size_t c = 0; c < k; ++c) {
            const __m256 v = _mm256_loadu_ps(src + c);
            a0 = _mm256_fmadd_ps(_mm256_broadcast_ss(w0 + wo + c), v, a0);
            a1 = _mm256_fmadd_ps(_mm256_broadcast_ss(w1 + wo + c), v, a1);
          }
        }
        _mm256_storeu_ps(o0 + ro + t, a0);
        _mm256_storeu_ps(o1 + ro + t, a1);
      }
      for (; t < cols; ++t) {
        float s0 = o0[ro + t], s1 = o1[ro + t];
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          for (std::size_t c = 0; c < k; ++c) {
            s0 += w0[a * k + c] * src[c];
            s1 += w1[a * k + c] * src[c];
          }
        }
        o0[ro + t] = s0;
        o1[ro + t] = s1;
      }
    }
  }
  // Remaining filters one at a time, three column blocks per step.
  for (; f0 < n_filters; ++f0) {
    const float* wf = w + f0 * k * k;
    float* of = out + f0 * plane;
    for (std::size_t r = 0; r < rows; ++r) {
      float* orow = of + r * cols;
      std::size_t t = 0;
      for (; t + 24 <= cols; t += 24) {
        __m256 a0 = _mm256_loadu_ps(orow + t), a1 = _mm256_loadu_ps(orow + t + 8), a2 = _mm256_loadu_ps(orow + t + 16);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          for (std::size_t c = 0; c < k; ++c) {
            const __m256 b = _mm256_broadcast_ss(wf + a * k + c);
            a0 = _mm256_fmadd_ps(b, _mm256_loadu_ps(src + c), a0);
            a1 = _mm256_fmadd_ps(b, _mm256_loadu_ps(src + c + 8), a1);
            a2 = _mm256_fmadd_ps(b, _mm256_loadu_ps(src + c + 16), a2);
          }
        }
        _mm256_storeu_ps(orow + t, a0);
        _mm256_storeu_ps(orow + t + 8, a1);
        _mm256_storeu_ps(orow + t + 16, a2);
      }
      for (; t + 8 <= cols; t += 8) {
        __m256 a0 = _mm256_loadu_ps(orow + t);
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          for (std::size_t c = 0; c < k; ++c) {
            a0 = _mm256_fmadd_ps(_mm256_broadcast_ss(wf + a * k + c), _mm256_loadu_ps(src + c), a0);
          }
        }
        _mm256_storeu_ps(orow + t, a0);
      }
      for (; t < cols; ++t) {
        float s = orow[t];
        for (std::size_t a = 0; a < k; ++a) {
          const float* src = in + (r + a) * stride + t;
          for (std::size_t c = 0; c < k; ++c) s += wf[a * k + c] * src[c];
        }
        orow[t] = s;
      }
    }
  }
}

// Weight gradient. Pairs of filters share every input load; each pass covers
// four neighbouring kernel columns (eight accumulators).
void corr_accumulate_avx2(const float* in, std::size_t stride, std::size_t rows, std::size_t cols, std::size_t k,
                          const float* dout, std::size_t n_filters, float* grad) {
  const std::size_t vec_end = cols - cols % 8;
  const std::size_t plane = rows * cols;
  std::size_t f = 0;
  for (; f + 2 <= n_filters; f += 2) {
    const float* d0f = dout + f * plane;
    const float* d1f = d0f + plane;
    float* g0 = grad + f * k * k;
    float* g1 = g0 + k * k;
    for (std::size_t a = 0; a < k; ++a) {
      std::size_t c = 0;
      for (; c + 4 <= k; c += 4) {
        __m256 s00 = _mm256_setzero_ps(), s01 = _mm256_setzero_ps(), s02 = _mm256_setzero_ps(),
               s03 = _mm256_setzero_ps();
        __m256 s10 = _mm256_setzero_ps(), s11 = _mm256_setzero_ps(), s12 = _mm256_setzero_ps(),
               s13 = _mm256_setzero_ps();
        float t0[4] = {0, 0, 0, 0}, t1[4] = {0, 0, 0, 0};
        for (std::size_t r = 0; r < rows; ++r) {
          const float* d0 = d0f + r * cols;
          const float* d1 = d1f + r * cols;
          const float* src = in + (r + a) * stride + c;
          for (std::size_t t = 0; t < vec_end; t += 8) {
            const __m256 u0 = _mm256_loadu_ps(d0 + t);
            const __m256 u1 = _mm256_loadu_ps(d1 + t);
            const __m256 v0 = _mm256_loadu_ps(src + t);
            const __m256 v1 = _mm256_loadu_ps(src + t + 1);
            const __m256 v2 = _mm256_loadu_ps(src + t + 2);
            const __m256 v3 = _mm256_loadu_ps(src + t + 3);
            s00 = _mm256_fmadd_ps(u0, v0, s00);
            s01 = _mm256_fmadd_ps(u0, v1, s01);
            s02 = _mm256_fmadd_ps(u0, v2, s02);
            s03 = _mm256_fmadd_ps(u0, v3, s03);
            s10 = _mm256_fmadd_ps(u1, v0, s10);
            s11 = _mm256_fmadd_ps(u1, v1, s11);
            s12 = _mm256_fmadd_ps(u1, v2, s12);
            s13 = _mm256_fmadd_ps(u1, v3, s13);
          }
          for (std::size_t t = vec_end; t < cols; ++t) {
            for (std::size_t j = 0; j < 4; ++j) {
              t0[j] += d0[t] * src[t + j];
              t1[j] += d1[t] * src[t + j];
            }
          }
        }
        g0[a * k + c] += hsum(s00) + t0[0];
        g0[a * k + c + 1] += hsum(s01) + t0[1];
        g0[a * k + c + 2] += hsum(s02) + t0[2];
        g0[a * k + c + 3] += hsum(s03) + t0[3];
        g1[a * k + c] += hsum(s10) + t1[0];
        g1[a * k + c + 1] += hsum(s11) + t1[1];
        g1[a * k + c + 2] += hsum(s12) + t1[2];
        g1[a * k + c + 3] += hsum(s13) + t1[3];
      }
      for (; c < k; ++c) {
        __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
        float t0 = 0, t1 = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          const float* d0 = d0f + r * cols;
          const float* d1 = d1f + r * cols;
          const float* src = in + (r + a) * stride + c;
          for (std::size_t t = 0; t < vec_end; t += 8) {
            const __m256 v = _mm256_loadu_ps(src + t);
            s0 = _mm256_fmadd_ps(_mm256_loadu_ps(d0 + t), v, s0);
            s1 = _mm256_fmadd_ps(_mm256_loadu_ps(d1 + t), v, s1);
          }
          for (std::size_t t = vec_end; t < cols; ++t) {
            t0 += d0[t] * src[t];
            t1 += d1[t] * src[t];
          }
        }
        g0[a * k + c] += hsum(s0) + t0;
        g1[a * k + c] += hsum(s1) + t1;
      }
    }
  }
  for (; f < n_filters; ++f) {
    const float* df = dout + f * plane;
    float* gf = grad + f * k * k;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t c = 0; c < k; ++c) {
        __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
        float t0 = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          const float* drow = df + r * cols;
          const float* src = in + (r + a) * stride + c;
          std::size_t t = 0;
          for (; t + 16 <= vec_end; t += 16) {
            s0 = _mm256_fmadd_ps(_mm256_loadu_ps(drow + t), _mm256_loadu_ps(src + t), s0);
            s1 = _mm256_fmadd_ps(_mm256_loadu_ps(drow + t + 8), _mm256_loadu_ps(src + t + 8), s1);
          }
          for (; t < vec_end; t += 8) s0 = _mm256_fmadd_ps(_mm256_loadu_ps(drow + t), _mm256_loadu_ps(src + t), s0);
          for (t = vec_end; t < cols; ++t) t0 += drow[t] * src[t];
        }
        gf[a * k + c] += hsum(_mm256_add_ps(s0, s1)) + t0;
      }
    }
  }
}

float dot_avx2(const float* a, const float* b, std::size_t n) {
  __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), s0);
    s1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), s1);
  }
  for (; i + 8 <= n; i += 8) s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), s0);
  float s = hsum(_mm256_add_ps(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Vector forms of ref::fast::exp / normal_cdf.
inline __m256 exp_avx2(__m256 x) {
  namespace fc = ref::fast;
  x = _mm256_min_ps(_mm256_max_ps(x, _mm256_set1_ps(fc::kExpLo)), _mm256_set1_ps(fc::kExpHi));
  __m256 fx = _mm256_floor_ps(_mm256_fmadd_ps(x, _mm256_set1_ps(fc::kLog2e), _mm256_set1_ps(0.5f)));
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(fc::kLn2Hi), x);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(fc::kLn2Lo), x);
  __m256 y = _mm256_set1_ps(fc::kP0);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(fc::kP1));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(fc::kP2));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(fc::kP3));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(fc::kP4));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(fc::kP5));
  y = _mm256_fmadd_ps(y, _mm256_mul_ps(x, x), _mm256_add_ps(x, _mm256_set1_ps(1.0f)));
  __m256i e = _mm256_slli_epi32(_mm256_add_epi32(_mm256_cvttps_epi32(fx), _mm256_set1_epi32(127)), 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(e));
}

inline __m256 normal_cdf_avx2(__m256 z, __m256* gauss) {
  namespace fc = ref::fast;
  const __m256 sign_mask = _mm256_set1_ps(-0.0f);
  const __m256 u = _mm256_mul_ps(_mm256_andnot_ps(sign_mask, z), _mm256_set1_ps(fc::kInvSqrt2));
  const __m256 t = _mm256_div_ps(_mm256_set1_ps(1.0f), _mm256_fmadd_ps(_mm256_set1_ps(fc::kErfP), u, _mm256_set1_ps(1.0f)));
  __m256 poly = _mm256_set1_ps(fc::kA5);
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(fc::kA4));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(fc::kA3));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(fc::kA2));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(fc::kA1));
  poly = _mm256_mul_ps(poly, t);
  const __m256 e = exp_avx2(_mm256_xor_ps(_mm256_mul_ps(u, u), sign_mask));
  *gauss = e;
  const __m256 erf_abs = _mm256_fnmadd_ps(poly, e, _mm256_set1_ps(1.0f));
  const __m256 erf_signed = _mm256_or_ps(erf_abs, _mm256_and_ps(z, sign_mask));
  return _mm256_mul_ps(_mm256_set1_ps(0.5f), _mm256_add_ps(_mm256_set1_ps(1.0f), erf_signed));
}

void gelu_forward_avx2(const float* z, float* h, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(z + i);
    __m256 g;
    _mm256_storeu_ps(h + i, _mm256_mul_ps(v, normal_cdf_avx2(v, &g)));
  }
  ref::fast::gelu_forward(z + i, h + i, n - i);
}

void gelu_backward_avx2(const float* z, const float* dh, float* dz, std::size_t n) {
  std::size_t i = 0;
  const __m256 k = _mm256_set1_ps(ref::fast::kInvSqrt2Pi);
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(z + i);
    __m256 g;
    const __m256 cdf = normal_cdf_avx2(v, &g);
    const __m256 deriv = _mm256_fmadd_ps(_mm256_mul_ps(v, k), g, cdf);
    _mm256_storeu_ps(dz + i, _mm256_mul_ps(_mm256_loadu_ps(dh + i), deriv));
  }
  ref::fast::gelu_backward(z + i, dh + i, dz + i, n - i);
}

}  // namespace

const KernelTable<float>* avx2_float_kernels() {
  static const KernelTable<float> table{Isa::Avx2,       conv_accumulate_avx2, corr_accumulate_avx2, gelu_forward_avx2,
                                        gelu_backward_avx2, dot_avx2,             axpy_avx2};
  return &table;
}

}  // namespace gazenet::simd
