#include "nnjump/kernels/kernels.hpp"

#include <atomic>

namespace nnjump::kernels {

namespace {

Isa probe() {
#if defined(__x86_64__) || defined(__i386__)
  if (avx2::compiled() && __builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

bool use_avx2() { return selected().load(std::memory_order_relaxed) == Isa::Avx2; }

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void select_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  selected().store(isa, std::memory_order_relaxed);
}

std::size_t clamped_axpy(std::span<double> x, std::span<const double> coef, double noise) {
  // Short spans (one or two coupled lanes) never amortize the vector setup.
  if (x.size() >= 4 && use_avx2()) return avx2::clamped_axpy(x, coef, noise);
  return scalar::clamped_axpy(x, coef, noise);
}

double sum(std::span<const double> v) {
  return use_avx2() ? avx2::sum(v) : scalar::sum(v);
}

double sum_sq_dev(std::span<const double> v, double center) {
  return use_avx2() ? avx2::sum_sq_dev(v, center) : scalar::sum_sq_dev(v, center);
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return use_avx2() ? avx2::abs_diff_sum(a, b) : scalar::abs_diff_sum(a, b);
}

std::size_t count_exceedances(std::span<const double> low, std::span<const double> high,
                              double tol) {
  return use_avx2() ? avx2::count_exceedances(low, high, tol)
                    : scalar::count_exceedances(low, high, tol);
}

}  // namespace nnjump::kernels
