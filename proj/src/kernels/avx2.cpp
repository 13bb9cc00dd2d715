#include "nnjump/kernels/kernels.hpp"

#include <cmath>

#if defined(NNJUMP_HAVE_AVX2_TU)
#include <immintrin.h>
#endif

namespace nnjump::kernels::avx2 {

#if defined(NNJUMP_HAVE_AVX2_TU)

bool compiled() { return true; }

namespace {

inline double reduce_lanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

}  // namespace

std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise) {
  const std::size_t n = x.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d w = _mm256_set1_pd(noise);
  std::size_t clamped = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(coef.data() + i), w);
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(x.data() + i), prod);
    const int neg = _mm256_movemask_pd(_mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    clamped += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(neg)));
    _mm256_storeu_pd(x.data() + i, _mm256_max_pd(v, zero));
  }
  for (; i < n; ++i) {
    const double v = x[i] + coef[i] * noise;
    if (v < 0.0) ++clamped;
    x[i] = v > 0.0 ? v : 0.0;
  }
  return clamped;
}

double sum(std::span<const double> v) {
  const std::size_t n = v.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v.data() + i));
  double total = reduce_lanes(acc);
  for (; i < n; ++i) total += v[i];
  return total;
}

double sum_sq_dev(std::span<const double> v, double center) {
  const std::size_t n = v.size();
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v.data() + i), c);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = reduce_lanes(acc);
  for (; i < n; ++i) {
    const double d = v[i] - center;
    total += d * d;
  }
  return total;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, abs_pd(d));
  }
  double total = reduce_lanes(acc);
  for (; i < n; ++i) total += std::fabs(a[i] - b[i]);
  return total;
}

std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol) {
  const std::size_t n = low.size();
  const __m256d t = _mm256_set1_pd(tol);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bound = _mm256_add_pd(_mm256_loadu_pd(high.data() + i), t);
    const int gt = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(low.data() + i), bound, _CMP_GT_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(gt)));
  }
  for (; i < n; ++i) {
    if (low[i] > high[i] + tol) ++count;
  }
  return count;
}

#else

bool compiled() { return false; }
std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise) {
  return scalar::clamped_axpy(x, coef, noise);
}
double sum(std::span<const double> v) { return scalar::sum(v); }
double sum_sq_dev(std::span<const double> v, double center) { return scalar::sum_sq_dev(v, center); }
double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return scalar::abs_diff_sum(a, b);
}
std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol) {
  return scalar::count_exceedances(low, high, tol);
}

#endif

}  // namespace nnjump::kernels::avx2
