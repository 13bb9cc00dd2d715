#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "nnjump/kernels/kernels.hpp"

using namespace nnjump;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, DispatchReportsIsa) {
  const auto isa = kernels::detected_isa();
  kernels::select_isa(isa);
  EXPECT_EQ(kernels::active_isa(), isa);
  if (!kernels::avx2::compiled()) {
    EXPECT_EQ(isa, kernels::Isa::Scalar);
  }
}

TEST(Kernels, ReductionsBitIdenticalAcrossIsa) {
  if (kernels::detected_isa() != kernels::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this host";
  std::mt19937_64 rng(17);
  for (std::size_t n = 0; n < 70; ++n) {
    for (double scale : {1e-8, 1.0, 1e6}) {
      const auto a = random_vec(rng, n, scale);
      const auto b = random_vec(rng, n, scale);
      EXPECT_TRUE(same_bits(kernels::scalar::sum(a), kernels::avx2::sum(a))) << n;
      EXPECT_TRUE(same_bits(kernels::scalar::sum_sq_dev(a, 0.3), kernels::avx2::sum_sq_dev(a, 0.3))) << n;
      EXPECT_TRUE(same_bits(kernels::scalar::abs_diff_sum(a, b), kernels::avx2::abs_diff_sum(a, b))) << n;
      EXPECT_EQ(kernels::scalar::count_exceedances(a, b, 1e-12), kernels::avx2::count_exceedances(a, b, 1e-12));
    }
  }
}

TEST(Kernels, ClampedAxpyBitIdenticalAcrossIsa) {
  if (kernels::detected_isa() != kernels::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this host";
  std::mt19937_64 rng(5);
  for (std::size_t n = 0; n < 70; ++n) {
    auto x = random_vec(rng, n, 1.0);
    for (auto& v : x) v = std::fabs(v);
    const auto c = random_vec(rng, n, 2.0);
    auto xs = x, xv = x;
    const double noise = -0.7;
    const auto ns = kernels::scalar::clamped_axpy(xs, c, noise);
    const auto nv = kernels::avx2::clamped_axpy(xv, c, noise);
    EXPECT_EQ(ns, nv);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_TRUE(same_bits(xs[i], xv[i])) << i;
      EXPECT_GE(xs[i], 0.0);
    }
  }
}

TEST(Kernels, ScalarReferenceValues) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{1, 1, 4, 4, 0};
  EXPECT_DOUBLE_EQ(kernels::sum(a), 15.0);
  EXPECT_DOUBLE_EQ(kernels::sum_sq_dev(a, 3.0), 10.0);
  EXPECT_DOUBLE_EQ(kernels::abs_diff_sum(a, b), 0 + 1 + 1 + 0 + 5);
  EXPECT_EQ(kernels::count_exceedances(a, b, 1e-12), 2u);
  std::vector<double> x{1.0, 0.1, 0.0};
  const std::vector<double> c{1.0, 1.0, 0.0};
  EXPECT_EQ(kernels::clamped_axpy(x, c, -0.5), 1u);
  EXPECT_DOUBLE_EQ(x[0], 0.5);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
}

TEST(Kernels, DispatchedResultDoesNotDependOnSelection) {
  std::mt19937_64 rng(3);
  const auto a = random_vec(rng, 1001, 1.0);
  kernels::select_isa(kernels::Isa::Scalar);
  const double s = kernels::sum(a);
  kernels::select_isa(kernels::detected_isa());
  const double v = kernels::sum(a);
  EXPECT_TRUE(same_bits(s, v));
}
