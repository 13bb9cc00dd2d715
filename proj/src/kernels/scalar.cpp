#include "nnjump/kernels/kernels.hpp"

#include <array>
#include <cmath>

namespace nnjump::kernels::scalar {

namespace {

// Four interleaved partial sums, combined in the same order as the vector
// variants reduce their register lanes.
template <class Term>
double lane_sum(std::size_t n, Term term) {
  std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += term(i);
    acc[1] += term(i + 1);
    acc[2] += term(i + 2);
    acc[3] += term(i + 3);
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += term(i);
  return total;
}

}  // namespace

std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise) {
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] + coef[i] * noise;
    if (v < 0.0) ++clamped;
    x[i] = v > 0.0 ? v : 0.0;
  }
  return clamped;
}

double sum(std::span<const double> v) {
  return lane_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double sum_sq_dev(std::span<const double> v, double center) {
  return lane_sum(v.size(), [&](std::size_t i) {
    const double d = v[i] - center;
    return d * d;
  });
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return lane_sum(a.size(), [&](std::size_t i) { return std::fabs(a[i] - b[i]); });
}

std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (low[i] > high[i] + tol) ++n;
  }
  return n;
}

}  // namespace nnjump::kernels::scalar
