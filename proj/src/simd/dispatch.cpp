#include <cstdlib>
#include <cstring>

#include "gazenet/simd.hpp"
#include "kernels_ref.hpp"

namespace gazenet::simd {

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable<float>& scalar_float_kernels() {
  static const KernelTable<float> table{Isa::Scalar,
                                        ref::conv_accumulate<float>,
                                        ref::corr_accumulate<float>,
                                        ref::fast::gelu_forward,
                                        ref::fast::gelu_backward,
                                        ref::dot<float>,
                                        ref::axpy<float>};
  return table;
}

const KernelTable<double>& scalar_double_kernels() {
  static const KernelTable<double> table{Isa::Scalar,
                                         ref::conv_accumulate<double>,
                                         ref::corr_accumulate<double>,
                                         ref::gelu_forward_exact,
                                         ref::gelu_backward_exact,
                                         ref::dot<double>,
                                         ref::axpy<double>};
  return table;
}

#ifndef GAZENET_HAVE_AVX2
const KernelTable<float>* avx2_float_kernels() { return nullptr; }
#endif

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable<float>& active_float_kernels() {
  static const KernelTable<float>& table = [] () -> const KernelTable<float>& {
    const char* force = std::getenv("GAZENET_SIMD");
    if (force && std::strcmp(force, "scalar") == 0) return scalar_float_kernels();
    if (const auto* avx2 = avx2_float_kernels(); avx2 && cpu_supports_avx2()) return *avx2;
    return scalar_float_kernels();
  }();
  return table;
}

}  // namespace gazenet::simd
