#include "simd/kernels_internal.hpp"

#include <limits>

namespace tmrc::simd::scalar {

void em_update(double* x, const double* grad, const double* noise, std::size_t len, double h,
               double scale) {
  for (std::size_t i = 0; i < len; ++i) {
    const double drift = x[i] - h * grad[i];
    x[i] = drift + scale * noise[i];
  }
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] = y[i] + a * x[i];
}

double dot(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
  return s;
}

void sqdist_rows(const double* point, const double* rows, std::size_t count, std::size_t dim,
                 double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const double* r = rows + j * dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = point[d] - r[d];
      s += diff * diff;
    }
    out[j] = s;
  }
}

std::size_t nearest_row(const double* point, const double* rows, std::size_t count, std::size_t dim,
                        double* best_sqdist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    const double* r = rows + j * dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = point[d] - r[d];
      s += diff * diff;
    }
    if (s < best_d) {
      best_d = s;
      best = j;
    }
  }
  if (best_sqdist) *best_sqdist = best_d;
  return best;
}

}  // namespace tmrc::simd::scalar
