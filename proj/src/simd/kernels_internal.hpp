#pragma once

#include <cstddef>

namespace tmrc::simd {

namespace scalar {
void em_update(double* x, const double* grad, const double* noise, std::size_t len, double h,
               double scale);
void axpy(double a, const double* x, double* y, std::size_t len);
double dot(const double* a, const double* b, std::size_t len);
void sqdist_rows(const double* point, const double* rows, std::size_t count, std::size_t dim,
                 double* out);
std::size_t nearest_row(const double* point, const double* rows, std::size_t count, std::size_t dim,
                        double* best_sqdist);
}  // namespace scalar

#if defined(TMRC_HAVE_AVX2)
namespace avx2 {
void em_update(double* x, const double* grad, const double* noise, std::size_t len, double h,
               double scale);
void axpy(double a, const double* x, double* y, std::size_t len);
double dot(const double* a, const double* b, std::size_t len);
void sqdist_rows(const double* point, const double* rows, std::size_t count, std::size_t dim,
                 double* out);
std::size_t nearest_row(const double* point, const double* rows, std::size_t count, std::size_t dim,
                        double* best_sqdist);
}  // namespace avx2
#endif

}  // namespace tmrc::simd
