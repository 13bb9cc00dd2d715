#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nnjump/engine.hpp"
#include "nnjump/ensemble.hpp"
#include "nnjump/error.hpp"

using namespace nnjump;

namespace {

SimulationConfig config(double dt, double horizon, std::size_t paths, std::uint64_t seed = 1) {
  SimulationConfig c;
  c.dt_max = dt;
  c.horizon = horizon;
  c.n_paths = paths;
  c.root_seed = seed;
  return c;
}

ModelSpec pure_immigration() {
  GeneralJump g;
  g.sigma = ScalarFn::zero();
  g.b = ScalarFn::zero();
  g.h1 = RateKernel::constant(1.0);
  g.mu1 = JumpMeasure::cpp(2.0, PointMass{0.5});
  ModelSpec m;
  m.name = "immigration";
  m.form = g;
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec cir_with_point_immigration() {
  CBI c;
  c.a = 1.0;
  c.b = 1.0;
  c.beta = -1.0;
  c.nu1 = JumpMeasure::cpp(1.0, PointMass{1.0});
  ModelSpec m;
  m.name = "cir_jumps";
  m.form = c;
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

}  // namespace

TEST(Engine, ZeroCoefficientsGiveConstantPath) {
  auto m = presets::cbi(0.0, 0.0, 0.0);
  std::get<CBI>(m.form).nu0.reset();
  std::get<CBI>(m.form).nu1.reset();
  const auto p = simulate_path(m, config(1e-2, 1.0, 1), 1.0, 0);
  ASSERT_FALSE(p.states.empty());
  for (double x : p.states) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(p.exit, ExitKind::Completed);
}

TEST(Engine, PureImmigrationMean) {
  const Engine e(pure_immigration(), config(1e-2, 1.0, 100000));
  EnsembleOptions o;
  o.t_grid = {1.0};
  const auto r = run_ensemble(e, 0.0, o);
  EXPECT_NEAR(r.stats[0].mean, 1.0, 3.0 * r.stats[0].se);
}

TEST(Engine, CirMeanMatchesMomentEquation) {
  const Engine e(presets::cir(), config(1e-3, 1.0, 100000, 7));
  EnsembleOptions o;
  o.t_grid = {1.0};
  const auto r = run_ensemble(e, 1.0, o);
  EXPECT_NEAR(r.stats[0].mean, 1.0, 3.0 * r.stats[0].se + 0.01);
}

TEST(Engine, ReplayIsBitIdentical) {
  for (const auto& name : presets::names()) {
    const auto m = presets::by_name(name);
    const auto cfg = config(1e-2, 1.0, 1, 31);
    const auto a = simulate_path(m, cfg, 1.0, 4);
    const auto b = simulate_path(m, cfg, 1.0, 4);
    EXPECT_EQ(a.times, b.times) << name;
    EXPECT_EQ(a.states, b.states) << name;
    EXPECT_EQ(a.jumps.size(), b.jumps.size()) << name;
  }
}

TEST(Engine, JumpsAreLoggedAndApplied) {
  const auto p = simulate_path(pure_immigration(), config(1e-2, 5.0, 1, 3), 0.0, 0);
  ASSERT_FALSE(p.jumps.empty());
  for (const auto& j : p.jumps) {
    EXPECT_DOUBLE_EQ(j.post - j.pre, 0.5);
    EXPECT_DOUBLE_EQ(p.at(j.event.time), j.post);
    bool found = false;
    for (double t : p.times) found = found || t == j.event.time;
    EXPECT_TRUE(found);
  }
}

TEST(Engine, PatchedWithoutFiniteImmigrationEqualsPath) {
  const auto cfg = config(1e-2, 1.0, 1, 5);
  auto no_immigration = presets::stable_cbi();
  std::get<StableCBI>(no_immigration.form).nu1.reset();
  for (const auto& m : {presets::cir(), no_immigration}) {
    const auto a = simulate_path(m, cfg, 1.0, 2);
    const auto b = simulate_patched(m, cfg, 1.0, 2);
    EXPECT_EQ(a.times, b.times);
    EXPECT_EQ(a.states, b.states);
  }
}

TEST(Engine, PatchedPointMassJumpIsExact) {
  const auto p = simulate_patched(cir_with_point_immigration(), config(1e-2, 3.0, 1, 9), 1.0, 0);
  ASSERT_FALSE(p.jumps.empty());
  for (const auto& j : p.jumps) EXPECT_EQ(j.post, j.pre + 1.0);
}

TEST(Engine, PatchedAgreesInLaw) {
  const auto model = cir_with_point_immigration();
  const Engine e(model, config(1e-2, 1.0, 100000, 13));
  EnsembleOptions o;
  o.t_grid = {1.0};
  const auto plain = run_ensemble(e, 1.0, o);
  o.patched = true;
  const auto patched = run_ensemble(e, 1.0, o);
  const double se = std::hypot(plain.stats[0].se, patched.stats[0].se);
  EXPECT_NEAR(plain.stats[0].mean, patched.stats[0].mean, 3.0 * se);
}

TEST(Engine, CoupledIdenticalStarts) {
  const auto m = presets::cbi(1.0, 1.0, 0.0);
  const auto cp = simulate_coupled(m, config(1e-2, 1.0, 1, 2), 1.5, 1.5, 0);
  EXPECT_EQ(cp.low.states, cp.high.states);
  EXPECT_EQ(cp.low.times, cp.high.times);
}

TEST(Engine, CoupledZeroHorizon) {
  const auto cp = simulate_coupled(presets::cbi(1.0, 1.0, 0.0), config(1e-2, 0.0, 1, 2), 1.0, 2.0, 0);
  EXPECT_EQ(cp.low.states.size(), 1u);
  EXPECT_EQ(cp.high.states.size(), 1u);
  EXPECT_LE(cp.low.states[0], cp.high.states[0]);
}

TEST(Engine, CoupledRequiresMonotoneFlags) {
  auto m = presets::cbi(1.0, 1.0, 0.0);
  m.h0_monotone = false;
  try {
    simulate_coupled(m, config(1e-2, 1.0, 1), 1.0, 2.0, 0);
    ADD_FAILURE() << "expected MonotonicityUnverified";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MonotonicityUnverified);
  }
}

TEST(Engine, CoupledOrderPreserved) {
  const Engine e(presets::cbi(1.0, 1.0, 0.0), config(1e-3, 1.0, 2000, 21));
  CoupledOptions o;
  o.x0 = {1.0, 2.0};
  o.t = 1.0;
  o.check_order = true;
  const auto r = run_coupled_ensemble(e, o);
  EXPECT_GT(r.checks, 0u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(Engine, MomentSummaryArithmetic) {
  SimPath a, b;
  a.times = b.times = {0.0, 1.0};
  a.states = {1.0, 0.0};
  b.states = {1.0, 2.0};
  const std::vector<SimPath> ps{a, b};
  const auto s = moment_summary(ps, 1.0);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_DOUBLE_EQ(s.second, 2.0);
  const auto c = moment_summary(ps, 0.5);
  EXPECT_DOUBLE_EQ(c.mean, 1.0);
  EXPECT_DOUBLE_EQ(c.second, 1.0);
  EXPECT_DOUBLE_EQ(c.se_mean, 0.0);
  EXPECT_DOUBLE_EQ(c.se_second, 0.0);
}

TEST(Engine, StatesNeverNegative) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    ModelSpec m;
    switch (trial % 4) {
      case 0: m = presets::cir(3.0 * u(rng), u(rng), -3.0 * u(rng)); break;
      case 1: m = presets::cbi(3.0 * u(rng), u(rng), -2.0 * u(rng)); break;
      case 2: m = presets::stable_cbi(u(rng), u(rng), -u(rng), 2.0 * u(rng), 1.1 + 0.8 * u(rng)); break;
      default: m = presets::by_name(presets::names()[static_cast<std::size_t>(trial) % presets::names().size()]);
    }
    const auto cfg = config(0.02, 2.0, 1, static_cast<std::uint64_t>(trial));
    for (std::uint64_t id = 0; id < 20; ++id) {
      const auto p = simulate_path(m, cfg, 0.05 + u(rng), id);
      for (double x : p.states) ASSERT_GE(x, 0.0) << m.name;
      for (const auto& j : p.jumps) ASSERT_GE(j.post, 0.0);
    }
  }
}

TEST(Engine, ThreadCountDoesNotChangeResults) {
  const Engine e(presets::cbi(), config(1e-2, 1.0, 500, 4));
  EnsembleOptions o;
  o.t_grid = {0.5, 1.0};
  o.threads = 1;
  const auto a = run_ensemble(e, 1.0, o);
  o.threads = 3;
  const auto b = run_ensemble(e, 1.0, o);
  for (std::size_t i = 0; i < a.stats.size(); ++i) {
    EXPECT_EQ(a.stats[i].mean, b.stats[i].mean);
    EXPECT_EQ(a.stats[i].var, b.stats[i].var);
  }
}

TEST(Engine, ConfigValidation) {
  auto c = config(1e-2, 1.0, 1);
  c.m_cap = 0.5;
  EXPECT_THROW(c.validate(1.0), Error);
  c = config(0.0, 1.0, 1);
  EXPECT_THROW(c.validate(1.0), Error);
  c = config(1e-2, 1.0, 1);
  c.eps = 0.0;
  EXPECT_THROW(c.validate(1.0), Error);
}

TEST(Engine, CapStopTruncates) {
  auto c = config(1e-2, 5.0, 1);
  c.m_cap = 1.5;
  c.cap_policy = CapPolicy::Stop;
  const auto p = simulate_path(pure_immigration(), c, 1.0, 0);
  EXPECT_EQ(p.exit, ExitKind::HitCap);
  EXPECT_LT(p.exit_time, 5.0);
}
