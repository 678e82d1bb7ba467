#include <cstdlib>
#include <string_view>

#include "bicwire/simd/kernels.hpp"

namespace bicwire::simd {

#if defined(BICWIRE_HAVE_AVX2)
const KernelTable& avx2_table_unchecked() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(BICWIRE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* find_kernels(std::string_view name) noexcept {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  return nullptr;
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    if (const char* env = std::getenv("BICWIRE_KERNELS")) {
      if (const KernelTable* t = find_kernels(env)) return *t;
    }
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace bicwire::simd
