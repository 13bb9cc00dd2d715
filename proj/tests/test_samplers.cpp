#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "nnjump/error.hpp"
#include "nnjump/samplers.hpp"

using namespace nnjump;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace

TEST(Samplers, SubstreamKeysDistinct) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t p = 0; p < 2000; ++p) {
    for (auto c : {StreamChannel::Brownian, StreamChannel::Jumps0, StreamChannel::Jumps1, StreamChannel::Thinning}) {
      keys.insert(substream_key(7, p, c));
    }
  }
  EXPECT_EQ(keys.size(), 8000u);
  EXPECT_EQ(substream_key(7, 3, StreamChannel::Jumps1), substream_key(7, 3, StreamChannel::Jumps1));
  EXPECT_NE(substream_key(7, 3, StreamChannel::Jumps1), substream_key(8, 3, StreamChannel::Jumps1));
}

TEST(Samplers, BrownianMeanAndVariance) {
  RandomStream s(1, 0, StreamChannel::Brownian);
  std::vector<double> v(1000000);
  for (auto& x : v) x = brownian_increment(s, 1.0);
  EXPECT_NEAR(moments(v).mean, 0.0, 4.0 / 1000.0);
  RandomStream r(1, 1, StreamChannel::Brownian);
  for (auto& x : v) x = brownian_increment(r, 0.25);
  EXPECT_NEAR(moments(v).var, 0.25, 0.0025);
}

TEST(Samplers, ReplayIsBitIdentical) {
  PathStreams a(99, 12), b(99, 12);
  const auto m = JumpMeasure::stable(1.0, 1.5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(brownian_increment(a.brownian, 0.1), brownian_increment(b.brownian, 0.1));
    EXPECT_EQ(stable_increment(a.jumps0, 1.5, 1.0, 0.1), stable_increment(b.jumps0, 1.5, 1.0, 0.1));
    EXPECT_EQ(thinning_accept(a.thinning, 0.3, 1.0), thinning_accept(b.thinning, 0.3, 1.0));
  }
  EXPECT_EQ(big_jump_schedule(a.jumps1, m, 0.5, 3.0, 2.0), big_jump_schedule(b.jumps1, m, 0.5, 3.0, 2.0));
}

TEST(Samplers, ChannelsDoNotPerturbEachOther) {
  PathStreams a(5, 3), b(5, 3);
  for (int i = 0; i < 1000; ++i) a.thinning.uniform();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.brownian.normal(), b.brownian.normal());
}

TEST(Samplers, ChannelIndependence) {
  const int n = 100000;
  std::vector<double> x(n), y(n);
  for (int p = 0; p < n / 100; ++p) {
    PathStreams s(11, static_cast<std::uint64_t>(p));
    for (int i = 0; i < 100; ++i) {
      x[p * 100 + i] = s.brownian.normal();
      y[p * 100 + i] = s.thinning.uniform();
    }
  }
  const auto mx = moments(x), my = moments(y);
  double cov = 0.0;
  for (int i = 0; i < n; ++i) cov += (x[i] - mx.mean) * (y[i] - my.mean);
  cov /= n - 1;
  const double corr = cov / std::sqrt(mx.var * my.var);
  EXPECT_LT(std::fabs(corr), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Samplers, StableLaplaceExponent) {
  EXPECT_NEAR(stable_laplace_exponent(1.5, 1.0), std::tgamma(0.5) / 0.75, 1e-12);
  EXPECT_NEAR(stable_laplace_exponent(1.5, 1.0), 2.3633, 1e-4);
  RandomStream s(2024, 0, StreamChannel::Jumps0);
  const int n = 1000000;
  std::vector<double> e(n);
  double mean = 0.0;
  for (auto& v : e) {
    const double x = stable_increment(s, 1.5, 1.0, 1.0);
    mean += x;
    v = std::exp(-x);
  }
  mean /= n;
  const auto m = moments(e);
  const double se = std::sqrt(m.var / n) / m.mean;
  EXPECT_NEAR(std::log(m.mean), 2.3633, 3.0 * se);
  // Centered: the mean is zero but the variance is infinite, so use a loose band.
  EXPECT_LT(std::fabs(mean), 0.05);
}

TEST(Samplers, StableRejectsAlphaOutsideRange) {
  RandomStream s(1, 0, StreamChannel::Jumps0);
  for (double a : {1.0, 2.0, 0.5, 2.5}) {
    try {
      stable_increment(s, a, 1.0, 1.0);
      ADD_FAILURE() << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidAlpha);
    }
  }
}

TEST(Samplers, StableSelfSimilarity) {
  const double alpha = 1.5;
  const std::size_t n = 20000;
  RandomStream s1(3, 0, StreamChannel::Jumps0), s2(3, 1, StreamChannel::Jumps0);
  std::vector<double> a(n), b(n);
  for (auto& x : a) x = stable_increment(s1, alpha, 1.0, 2.0);
  for (auto& x : b) x = std::pow(2.0, 1.0 / alpha) * stable_increment(s2, alpha, 1.0, 1.0);
  EXPECT_LT(ks_statistic(a, b), ks_critical_1pct(n, n));
}

TEST(Samplers, StableAdditivity) {
  const std::size_t n = 20000;
  RandomStream s1(4, 0, StreamChannel::Jumps0), s2(4, 1, StreamChannel::Jumps0);
  std::vector<double> direct(n), summed(n);
  for (auto& x : direct) x = stable_increment(s1, 1.3, 2.0, 1.0);
  for (auto& x : summed) x = stable_increment(s2, 1.3, 1.0, 1.0) + stable_increment(s2, 1.3, 1.0, 1.0);
  EXPECT_LT(ks_statistic(direct, summed), ks_critical_1pct(n, n));
}

TEST(Samplers, ScheduleCountAndMarks) {
  const auto m = JumpMeasure::stable(1.0, 1.5);
  const double rate = tail_mass(m, 1.0);
  const int n = 100000;
  double count = 0.0, count_sq = 0.0;
  std::size_t marks = 0, above = 0;
  for (int p = 0; p < n; ++p) {
    RandomStream s(77, static_cast<std::uint64_t>(p), StreamChannel::Jumps1);
    const auto ev = big_jump_schedule(s, m, 1.0, 3.0, rate);
    count += ev.size();
    count_sq += static_cast<double>(ev.size() * ev.size());
    double last = 0.0;
    for (const auto& e : ev) {
      EXPECT_GE(e.time, last);
      EXPECT_LE(e.time, 3.0);
      EXPECT_GT(e.size, 1.0);
      last = e.time;
      ++marks;
      if (e.size > 2.0) ++above;
    }
  }
  const double mean = count / n;
  const double se = std::sqrt((count_sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 2.0, 3.0 * se);
  const double p = static_cast<double>(above) / marks;
  const double target = std::pow(2.0, -1.5);
  EXPECT_NEAR(p, target, 3.0 * std::sqrt(target * (1 - target) / marks));
  EXPECT_NEAR(target, 0.3536, 1e-4);
}

TEST(Samplers, ScheduleDegenerateCases) {
  RandomStream s(1, 0, StreamChannel::Jumps1);
  const auto m = JumpMeasure::stable(1.0, 1.5);
  EXPECT_TRUE(big_jump_schedule(s, m, 1.0, 0.0, 1.0).empty());
  try {
    big_jump_schedule(s, JumpMeasure::cpp(1.0, UniformLaw{0.0, 1.0}), 2.0, 1.0, 1.0);
    ADD_FAILURE() << "expected EmptyTail";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyTail);
  }
}

TEST(Samplers, ThinningFrequency) {
  RandomStream s(8, 0, StreamChannel::Thinning);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += thinning_accept(s, 2.5, 10.0);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / n));
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(thinning_accept(s, 0.0, 10.0));
    EXPECT_TRUE(thinning_accept(s, 10.0, 10.0));
  }
  try {
    thinning_accept(s, 11.0, 10.0);
    ADD_FAILURE() << "expected RateExceedsDominator";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RateExceedsDominator);
  }
}
