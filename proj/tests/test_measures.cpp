#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nnjump/error.hpp"
#include "nnjump/measures.hpp"

using namespace nnjump;

namespace {

JumpMeasure stable_table(double c, double alpha, double lo, double hi, int n) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double z = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    pts.emplace_back(z, c * std::pow(z, -1.0 - alpha));
  }
  return JumpMeasure::table(pts);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(Measures, StableIntegrabilityOracle) {
  EXPECT_NEAR(check_integrability(JumpMeasure::stable(1.0, 1.5)), 4.0, 1e-12);
}

TEST(Measures, StableAlphaTwoDiverges) {
  EXPECT_EQ(kind_of([] { check_integrability(JumpMeasure::stable(1.0, 2.0)); }), ErrorKind::Divergent);
  EXPECT_EQ(kind_of([] { check_integrability(JumpMeasure::stable(1.0, 1.0)); }), ErrorKind::Divergent);
}

TEST(Measures, CompoundPoissonRawIntegralBoundedByRate) {
  for (double rate : {0.5, 1.0, 7.0}) {
    for (JumpLaw law : {JumpLaw{PointMass{0.3}}, JumpLaw{ExponentialLaw{2.0}}, JumpLaw{UniformLaw{0.0, 5.0}}}) {
      const double v = check_integrability(JumpMeasure::cpp(rate, law));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, rate + 1e-12);
    }
  }
}

TEST(Measures, TailMassOracles) {
  const auto m = JumpMeasure::stable(1.0, 1.5);
  EXPECT_NEAR(tail_mass(m, 1.0), 1.0 / 1.5, 1e-14);
  EXPECT_LT(tail_mass(m, 1e12), 1e-17);
  EXPECT_DOUBLE_EQ(tail_mass(JumpMeasure::cpp(2.0, PointMass{0.5}), 0.4), 2.0);
}

TEST(Measures, CompensatorDriftOracles) {
  const auto m = JumpMeasure::stable(1.0, 1.5);
  EXPECT_NEAR(compensator_drift(m, 0.01), 20.0, 1e-12);
  EXPECT_NEAR(compensator_drift(m, 1.0), 2.0, 1e-14);
}

TEST(Measures, SmallJumpVarianceOracles) {
  EXPECT_NEAR(small_jump_variance(JumpMeasure::stable(1.0, 1.5), 1.0), 2.0, 1e-14);
  EXPECT_NEAR(small_jump_variance(JumpMeasure::stable(2.0, 1.5), 1.0), 4.0, 1e-14);
  EXPECT_LT(small_jump_variance(JumpMeasure::stable(1.0, 1.5), 1e-12), 1e-5);
}

TEST(Measures, TableMatchesStableClosedForms) {
  const auto t = stable_table(1.0, 1.5, 1e-16, 1e14, 6001);
  const auto s = JumpMeasure::stable(1.0, 1.5);
  for (double eps : {0.01, 0.1, 1.0, 10.0}) {
    EXPECT_NEAR(tail_mass(t, eps) / tail_mass(s, eps), 1.0, 1e-6) << eps;
    EXPECT_NEAR(compensator_drift(t, eps) / compensator_drift(s, eps), 1.0, 1e-6) << eps;
    EXPECT_NEAR(small_jump_variance(t, eps) / small_jump_variance(s, eps), 1.0, 1e-6) << eps;
  }
}

TEST(Measures, MonotoneInEps) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::vector<JumpMeasure> ms{JumpMeasure::stable(1.3, 1.2), JumpMeasure::cpp(2.0, ExponentialLaw{1.0}),
                                    stable_table(1.0, 1.5, 1e-6, 1e6, 801)};
  for (const auto& m : ms) {
    for (int i = 0; i < 200; ++i) {
      double a = std::pow(10.0, u(rng)), b = std::pow(10.0, u(rng));
      if (a > b) std::swap(a, b);
      EXPECT_GE(tail_mass(m, a), tail_mass(m, b));
      EXPECT_GE(compensator_drift(m, a), compensator_drift(m, b));
      EXPECT_LE(small_jump_variance(m, a), small_jump_variance(m, b));
    }
  }
}

TEST(Measures, TableIntegrabilityAdditiveOverDisjointSupports) {
  std::vector<std::pair<double, double>> a, b;
  for (int i = 0; i <= 200; ++i) {
    const double z = 0.01 * std::pow(50.0, i / 200.0);
    a.emplace_back(z, std::exp(-z));
  }
  for (int i = 0; i <= 200; ++i) {
    const double z = 2.0 * std::pow(10.0, i / 200.0);
    b.emplace_back(z, 1.0 / (z * z));
  }
  const auto ma = JumpMeasure::table(a);
  const auto mb = JumpMeasure::table(b);
  const double sum = check_integrability(ma) + check_integrability(mb);
  EXPECT_GT(sum, 0.0);
  // Disjoint supports: integrals over each support add up.
  const double whole_a = ma.moment(2, 0.0, 1.0) + ma.moment(1, 1.0, INFINITY);
  const double whole_b = mb.moment(2, 0.0, 1.0) + mb.moment(1, 1.0, INFINITY);
  EXPECT_NEAR(whole_a + whole_b, sum, 1e-12 * sum);
  const double split = ma.moment(2, 0.0, 0.5) + ma.moment(2, 0.5, 1.0) + ma.moment(1, 1.0, 3.0) + ma.moment(1, 3.0, INFINITY);
  EXPECT_NEAR(split, whole_a, 1e-6 * whole_a);
}

TEST(Measures, ConstructionValidates) {
  EXPECT_EQ(kind_of([] { JumpMeasure::stable(1.0, -1.0); }), ErrorKind::InvalidAlpha);
  EXPECT_THROW(JumpMeasure::cpp(-1.0, PointMass{1.0}), Error);
  EXPECT_THROW(JumpMeasure::table({{1.0, 1.0}}), Error);
  EXPECT_THROW(JumpMeasure::table({{1.0, 1.0}, {0.5, 1.0}}), Error);
  EXPECT_THROW(JumpMeasure::table({{1.0, 1.0}, {2.0, -1.0}}), Error);
}

TEST(Measures, TableIsZeroOutsideGrid) {
  const auto t = JumpMeasure::table({{1.0, 1.0}, {2.0, 1.0}});
  EXPECT_DOUBLE_EQ(t.moment(0, 3.0, 10.0), 0.0);
  EXPECT_DOUBLE_EQ(t.moment(0, 0.0, 0.5), 0.0);
  // z f(z) is interpolated linearly in log z.
  EXPECT_NEAR(t.moment(0, 0.0, INFINITY), 1.5 * std::log(2.0), 1e-12);
}

TEST(Measures, SampleAboveStaysAboveEps) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<JumpMeasure> ms{JumpMeasure::stable(1.0, 1.5), JumpMeasure::cpp(1.0, ExponentialLaw{1.0}),
                                    JumpMeasure::cpp(1.0, UniformLaw{0.0, 2.0}), stable_table(1.0, 1.5, 1e-3, 1e3, 301)};
  for (const auto& m : ms) {
    for (int i = 0; i < 1000; ++i) EXPECT_GT(m.sample_above(0.5, u(rng)), 0.5);
  }
}
