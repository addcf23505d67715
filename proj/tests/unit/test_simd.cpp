#include <doctest.h>

#include <cmath>
#include <vector>

#include "gazenet/common.hpp"
#include "gazenet/simd.hpp"

using namespace gazenet;
using simd::KernelTable;

namespace {

std::vector<float> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

double gelu_exact(double z) { return 0.5 * z * (1.0 + std::erf(z / std::sqrt(2.0))); }

double gelu_exact_grad(double z) {
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))) + z * pdf;
}

void check_close(const std::vector<float>& a, const std::vector<float>& b, double tol) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(static_cast<double>(a[i]) - b[i]) / (1.0 + std::fabs(static_cast<double>(b[i]))));
  }
  CHECK(worst < tol);
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("dispatch reports a usable table") {
    const auto& k = simd::active_float_kernels();
    CHECK(k.conv_accumulate != nullptr);
    if (simd::cpu_supports_avx2() && simd::avx2_float_kernels()) CHECK(k.isa == simd::Isa::Avx2);
    CHECK(simd::scalar_float_kernels().isa == simd::Isa::Scalar);
  }

  TEST_CASE("scalar conv matches a direct loop") {
    Rng rng(1);
    for (std::size_t k : {1, 3, 5, 7}) {
      const std::size_t rows = 6, cols = 13, nf = 3, pad = k / 2;
      const std::size_t stride = cols + 2 * pad;
      auto img = random_vec(rng, (rows + 2 * pad) * stride);
      auto w = random_vec(rng, nf * k * k);
      std::vector<float> out(nf * rows * cols, 0.5f);
      simd::scalar_float_kernels().conv_accumulate(img.data(), stride, rows, cols, k, w.data(), nf, out.data());
      std::vector<float> expect(nf * rows * cols);
      for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t t = 0; t < cols; ++t) {
            double s = 0.5;
            for (std::size_t a = 0; a < k; ++a)
              for (std::size_t c = 0; c < k; ++c) s += double(w[(f * k + a) * k + c]) * img[(r + a) * stride + t + c];
            expect[(f * rows + r) * cols + t] = static_cast<float>(s);
          }
      check_close(out, expect, 1e-5);
    }
  }

  TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const auto* avx = simd::avx2_float_kernels();
    if (!avx || !simd::cpu_supports_avx2()) {
      MESSAGE("AVX2 unavailable; equivalence not exercised");
      return;
    }
    const auto& ref = simd::scalar_float_kernels();
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t k = 1 + 2 * rng.index(4);
      const std::size_t rows = 1 + rng.index(9), cols = 1 + rng.index(40), nf = 1 + rng.index(4);
      const std::size_t pad = k / 2, stride = cols + 2 * pad + rng.index(3);
      auto img = random_vec(rng, (rows + 2 * pad) * stride);
      auto w = random_vec(rng, nf * k * k);
      auto base = random_vec(rng, nf * rows * cols);
      auto a = base, b = base;
      ref.conv_accumulate(img.data(), stride, rows, cols, k, w.data(), nf, a.data());
      avx->conv_accumulate(img.data(), stride, rows, cols, k, w.data(), nf, b.data());
      check_close(b, a, 1e-5);

      auto dout = random_vec(rng, nf * rows * cols);
      auto ga = random_vec(rng, nf * k * k), gb = ga;
      ref.corr_accumulate(img.data(), stride, rows, cols, k, dout.data(), nf, ga.data());
      avx->corr_accumulate(img.data(), stride, rows, cols, k, dout.data(), nf, gb.data());
      check_close(gb, ga, 1e-4);

      const std::size_t n = 1 + rng.index(100);
      auto x = random_vec(rng, n, -6, 6), y = random_vec(rng, n);
      CHECK(avx->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-5));
      auto ya = y, yb = y;
      ref.axpy(0.37f, x.data(), ya.data(), n);
      avx->axpy(0.37f, x.data(), yb.data(), n);
      check_close(yb, ya, 1e-6);
      std::vector<float> ha(n), hb(n);
      ref.gelu_forward(x.data(), ha.data(), n);
      avx->gelu_forward(x.data(), hb.data(), n);
      check_close(hb, ha, 1e-6);
      ref.gelu_backward(x.data(), y.data(), ha.data(), n);
      avx->gelu_backward(x.data(), y.data(), hb.data(), n);
      check_close(hb, ha, 1e-6);
    }
  }

  TEST_CASE("GELU kernels track the exact erf form") {
    std::vector<float> z;
    for (double v = -8.0; v <= 8.0; v += 0.01) z.push_back(static_cast<float>(v));
    const std::size_t n = z.size();
    std::vector<float> ones(n, 1.0f), expect(n), expect_grad(n);
    for (std::size_t i = 0; i < n; ++i) {
      expect[i] = static_cast<float>(gelu_exact(z[i]));
      expect_grad[i] = static_cast<float>(gelu_exact_grad(z[i]));
    }
    std::vector<const KernelTable<float>*> tables{&simd::scalar_float_kernels()};
    if (simd::avx2_float_kernels() && simd::cpu_supports_avx2()) tables.push_back(simd::avx2_float_kernels());
    for (const auto* t : tables) {
      std::vector<float> h(n), dz(n);
      t->gelu_forward(z.data(), h.data(), n);
      t->gelu_backward(z.data(), ones.data(), dz.data(), n);
      check_close(h, expect, 5e-6);
      check_close(dz, expect_grad, 5e-6);
    }
    std::vector<double> zd(z.begin(), z.end()), hd(n);
    simd::scalar_double_kernels().gelu_forward(zd.data(), hd.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(hd[i] == doctest::Approx(gelu_exact(zd[i])).epsilon(1e-14));
  }
}
