#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; wider variants are selected at runtime from the CPU
// features and must match the reference:
//   em_update, axpy, sqdist_rows, nearest_row  bit-identical
//   dot                                        reassociated sum, ~1e-15 relative
//
// Selection can be forced with TMRC_SIMD=scalar|avx2 or set_isa().

#include <cstddef>
#include <span>
#include <string_view>

namespace tmrc::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// x[i] = (x[i] - h * grad[i]) + scale * noise[i]
  void (*em_update)(double* x, const double* grad, const double* noise, std::size_t len, double h,
                    double scale);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t len);
  double (*dot)(const double* a, const double* b, std::size_t len);
  /// out[j] = sum_d (point[d] - rows[j*dim + d])^2, accumulated in d order.
  void (*sqdist_rows)(const double* point, const double* rows, std::size_t count, std::size_t dim,
                      double* out);
  /// Index of the row minimizing sqdist_rows; ties go to the lowest index.
  std::size_t (*nearest_row)(const double* point, const double* rows, std::size_t count,
                             std::size_t dim, double* best_sqdist);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

/// Table used by the library. Defaults to the widest supported ISA unless
/// TMRC_SIMD overrides it.
const KernelTable& active() noexcept;
/// Forces a table; returns false (and changes nothing) if unsupported here.
bool set_isa(Isa isa) noexcept;

// Convenience wrappers over active().

inline void em_update(std::span<double> x, std::span<const double> grad, std::span<const double> noise,
                      double h, double scale) {
  active().em_update(x.data(), grad.data(), noise.data(), x.size(), h, scale);
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

}  // namespace tmrc::simd
