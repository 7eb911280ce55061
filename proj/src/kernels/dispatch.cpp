#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"
#include "sqfn/kernels.hpp"

namespace sqfn::kernels {

namespace {

constexpr KernelTable kScalar{"scalar",
                              scalar::weighted_sum,
                              scalar::masked_measure,
                              scalar::exp_weighted_sum,
                              scalar::max_value,
                              scalar::min_value,
                              scalar::max_inplace,
                              scalar::multiply};

#if SQFN_HAVE_AVX2_VARIANT
constexpr KernelTable kAvx2{"avx2",
                            avx2::weighted_sum,
                            avx2::masked_measure,
                            avx2::exp_weighted_sum,
                            avx2::max_value,
                            avx2::min_value,
                            avx2::max_inplace,
                            avx2::multiply};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
  const char* env = std::getenv("SQFN_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return kScalar;
  if (const KernelTable* t = avx2_table()) return *t;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if SQFN_HAVE_AVX2_VARIANT
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace sqfn::kernels
