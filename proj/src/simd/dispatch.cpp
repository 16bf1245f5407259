#include "tmrc/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "simd/kernels_internal.hpp"

namespace tmrc::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar,        "scalar",          &scalar::em_update,
                              &scalar::axpy,      &scalar::dot,      &scalar::sqdist_rows,
                              &scalar::nearest_row};

#if defined(TMRC_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2,       "avx2",          &avx2::em_update,
                            &avx2::axpy,     &avx2::dot,      &avx2::sqdist_rows,
                            &avx2::nearest_row};
#endif

bool cpu_has_avx2() noexcept {
#if defined(TMRC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const KernelTable* widest = avx2_kernels() ? avx2_kernels() : &kScalar;
  if (const char* env = std::getenv("TMRC_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return &kScalar;
    if (choice == "avx2" && avx2_kernels()) return avx2_kernels();
  }
  return widest;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

const KernelTable* avx2_kernels() noexcept {
#if defined(TMRC_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) noexcept {
  const KernelTable* t = isa == Isa::Scalar ? &kScalar : avx2_kernels();
  if (!t) return false;
  current().store(t);
  return true;
}

}  // namespace tmrc::simd
