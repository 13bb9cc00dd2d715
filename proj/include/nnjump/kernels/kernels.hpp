#pragma once

// Data-parallel inner loops shared by the engine and the diagnostics.
//
// Each kernel has a scalar reference implementation and an AVX2 variant. The
// scalar versions accumulate in four interleaved partial sums combined as
// (s0 + s1) + (s2 + s3), which is exactly the order the 256-bit variants use,
// so both produce bit-identical results. Dispatch is decided once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace nnjump::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best instruction set supported by this CPU and this build.
Isa detected_isa();
/// Currently selected instruction set (defaults to detected_isa()).
Isa active_isa();
/// Override the selection; requesting Avx2 on a CPU without it selects Scalar.
void select_isa(Isa isa);

/// x[i] <- max(0, x[i] + coef[i] * noise). Returns how many lanes went
/// strictly negative before clamping.
std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise);

/// Sum of the values.
double sum(std::span<const double> v);
/// Sum of (v[i] - center)^2.
double sum_sq_dev(std::span<const double> v, double center);
/// Sum of |a[i] - b[i]|.
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
/// Number of i with low[i] > high[i] + tol.
std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol);

namespace scalar {
std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise);
double sum(std::span<const double> v);
double sum_sq_dev(std::span<const double> v, double center);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol);
}  // namespace scalar

namespace avx2 {
bool compiled();
std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise);
double sum(std::span<const double> v);
double sum_sq_dev(std::span<const double> v, double center);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol);
}  // namespace avx2

}  // namespace nnjump::kernels
