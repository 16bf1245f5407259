#include "simd/kernels_internal.hpp"

#include <immintrin.h>

#include <limits>

namespace tmrc::simd::avx2 {

void em_update(double* x, const double* grad, const double* noise, std::size_t len, double h,
               double scale) {
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d drift = _mm256_sub_pd(xv, _mm256_mul_pd(vh, _mm256_loadu_pd(grad + i)));
    _mm256_storeu_pd(x + i, _mm256_add_pd(drift, _mm256_mul_pd(vs, _mm256_loadu_pd(noise + i))));
  }
  for (; i < len; ++i) {
    const double drift = x[i] - h * grad[i];
    x[i] = drift + scale * noise[i];
  }
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < len; ++i) y[i] = y[i] + a * x[i];
}

double dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= len; i += 4)
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) s += a[i] * b[i];
  return s;
}

namespace {

// Squared distances from `point` to rows j..j+3, summed over d in order so
// each lane reproduces the scalar reference exactly.
inline __m256d sqdist4(const double* point, const double* rows, std::size_t j, std::size_t dim) {
  const double* r0 = rows + j * dim;
  const double* r1 = r0 + dim;
  const double* r2 = r1 + dim;
  const double* r3 = r2 + dim;
  __m256d s = _mm256_setzero_pd();
  for (std::size_t d = 0; d < dim; ++d) {
    const __m256d rv = _mm256_set_pd(r3[d], r2[d], r1[d], r0[d]);
    const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(point[d]), rv);
    s = _mm256_add_pd(s, _mm256_mul_pd(diff, diff));
  }
  return s;
}

inline double sqdist1(const double* point, const double* r, std::size_t dim) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = point[d] - r[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

void sqdist_rows(const double* point, const double* rows, std::size_t count, std::size_t dim,
                 double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) _mm256_storeu_pd(out + j, sqdist4(point, rows, j, dim));
  for (; j < count; ++j) out[j] = sqdist1(point, rows + j * dim, dim);
}

std::size_t nearest_row(const double* point, const double* rows, std::size_t count, std::size_t dim,
                        double* best_sqdist) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  __m256d best = _mm256_set1_pd(inf);
  __m256i best_idx = _mm256_set1_epi64x(0);
  __m256i idx = _mm256_set_epi64x(3, 2, 1, 0);
  const __m256i four = _mm256_set1_epi64x(4);

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d s = sqdist4(point, rows, j, dim);
    const __m256d lt = _mm256_cmp_pd(s, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, s, lt);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), lt));
    idx = _mm256_add_epi64(idx, four);
  }

  alignas(32) double lane_d[4];
  alignas(32) long long lane_i[4];
  _mm256_store_pd(lane_d, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_idx);

  double best_d = inf;
  std::size_t best_j = 0;
  for (int l = 0; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_i[l]);
    if (lane_d[l] < best_d || (lane_d[l] == best_d && li < best_j && lane_d[l] != inf)) {
      best_d = lane_d[l];
      best_j = li;
    }
  }
  for (; j < count; ++j) {
    const double s = sqdist1(point, rows + j * dim, dim);
    if (s < best_d) {
      best_d = s;
      best_j = j;
    }
  }
  if (best_sqdist) *best_sqdist = best_d;
  return best_j;
}

}  // namespace tmrc::simd::avx2
