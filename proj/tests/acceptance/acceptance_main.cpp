// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "nnjump/analysis.hpp"
#include "nnjump/cli/run.hpp"
#include "nnjump/conditions.hpp"
#include "nnjump/engine.hpp"
#include "nnjump/ensemble.hpp"
#include "nnjump/error.hpp"
#include "nnjump/gadget.hpp"
#include "nnjump/samplers.hpp"

using namespace nnjump;
namespace fs = std::filesystem;

namespace {

constexpr double kZ = 3.0;
constexpr unsigned kThreads = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SimulationConfig config(double dt, std::size_t paths, std::uint64_t seed) {
  SimulationConfig c;
  c.dt_max = dt;
  c.horizon = 1.0;
  c.n_paths = paths;
  c.root_seed = seed;
  return c;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome nonnegativity() {
  std::size_t states = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (const char* name : {"cbi", "stable_cbi", "levy", "cbie"}) {
    const Engine e(presets::by_name(name), config(1e-3, 10000, 101));
    for (std::uint64_t p = 0; p < 10000; ++p) {
      const auto path = simulate_path(e, 1.0, p);
      for (double x : path.states) lowest = std::min(lowest, x);
      for (const auto& j : path.jumps) lowest = std::min(lowest, j.post);
      states += path.states.size();
    }
  }
  return {lowest >= 0.0, fmt("min state %.3g over %.0f stored states", lowest, static_cast<double>(states))};
}

Outcome first_moment() {
  CBI c{1.0, 1.0, -1.0, JumpMeasure::stable(1.0, 1.5), JumpMeasure::cpp(1.0, PointMass{2.0})};
  ModelSpec m;
  m.name = "cbi";
  m.form = c;
  m.h0_monotone = m.h1_monotone = true;
  const double K = check_linear_growth(m, default_state_grid(1e4)).constants.at("K");
  const Engine e(m, config(1e-3, 100000, 202));
  EnsembleOptions o;
  o.t_grid = {0.25, 0.5, 1.0};
  o.threads = kThreads;
  const auto r = run_ensemble(e, 1.0, o);
  bool ok = true;
  std::string d = fmt("K=%.3g", K);
  for (const auto& s : r.stats) {
    const double lhs = 1.0 + s.mean, rhs = (1.0 + r.x0) * std::exp(K * s.t) + kZ * s.se;
    ok = ok && lhs <= rhs;
    d += fmt("; t=%.2f %.4f <= %.4f", s.t, lhs, rhs);
  }
  return {ok, d};
}

Outcome cir_mean() {
  const Engine e(presets::cir(1.0, 1.0, -1.0), config(1e-3, 100000, 303));
  EnsembleOptions o;
  o.t_grid = {1.0};
  o.threads = kThreads;
  const auto r = run_ensemble(e, 1.0, o);
  const double err = std::fabs(r.stats[0].mean - 1.0), tol = kZ * r.stats[0].se + 0.01;
  const Engine coarse(presets::cir(1.0, 1.0, -1.0), config(0.05, 20000, 304));
  // x0 = 1 is the fixed point of the mean, where the bias vanishes
  const auto rich = richardson_check(coarse, 2.0, kThreads);
  return {err <= tol && rich.verdict == Verdict::Pass,
          fmt("|mean-1|=%.4g <= %.4g; ", err, tol) + "richardson " + std::string(to_string(rich.verdict)) +
              fmt(" (|B2|=%.3g vs bound %.3g)", rich.statistic, rich.band_hi)};
}

Outcome laplace() {
  RandomStream s(404, 0, StreamChannel::Jumps0);
  const std::size_t n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = std::exp(-stable_increment(s, 1.5, 1.0, 1.0));
    sum += y;
    sum2 += y * y;
  }
  const double mean = sum / n;
  const double var = (sum2 / n - mean * mean) * n / (n - 1.0);
  // upward jumps make E[e^{-X}] = e^{+psi}, so the exponent is log of the mean
  const double est = std::log(mean);
  // delta method: se(log m) = se(m) / m
  const double se = std::sqrt(var / n) / mean;
  // closed form, 2.3633 to four places
  const double oracle = stable_laplace_exponent(1.5, 1.0);
  return {std::fabs(est - oracle) <= kZ * se && std::fabs(oracle - 2.3633) < 5e-5,
          fmt("estimate %.5f vs %.5f, 3 SE = %.4g", est, oracle, kZ * se)};
}

Outcome second_moment() {
  const auto model = presets::bounded();
  const auto c = check_second_moment(model);
  if (c.verdict != Verdict::Pass) return {false, "second-moment check did not pass: " + c.note};
  const double K = c.constants.at("K");
  const Engine e(model, config(1e-3, 100000, 505));
  EnsembleOptions o;
  o.t_grid = {1.0};
  o.threads = kThreads;
  const auto r = run_ensemble(e, 1.0, o);
  const auto& s = r.stats[0];
  const double rhs = second_moment_bound(1.0, K, 1.0) + kZ * s.second_se;
  return {s.second <= rhs, fmt("K=%.3g; E[x^2]=%.4f <= %.4f", K, s.second, rhs)};
}

Outcome comparison() {
  const Engine e(presets::cbi(1.0, 1.0, 0.0), config(1e-3, 10000, 606));
  CoupledOptions o;
  o.x0 = {1.0, 2.0};
  o.t = 1.0;
  o.threads = kThreads;
  o.check_order = true;
  const auto r = run_coupled_ensemble(e, o);
  return {r.violations == 0 && r.checks > 0,
          fmt("%.0f violations over %.0f grid checks in %.0f pairs", static_cast<double>(r.violations),
              static_cast<double>(r.checks), static_cast<double>(r.n_paths))};
}

Outcome dependence() {
  const Engine e(presets::cir(1.0, 1.0, -1.0), config(1e-3, 10000, 707));
  const std::vector<double> starts{2.0, 1.5, 1.25, 1.125};
  std::vector<DependencePoint> curve;
  const auto rep = dependence_curve(e, 1.0, starts, 1.0, kThreads, &curve);
  bool ok = rep.verdict == Verdict::Pass && curve.size() == starts.size();
  std::string d = "monotone " + std::string(to_string(rep.verdict));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double oracle = curve[i].gap * std::exp(-1.0);
    ok = ok && std::fabs(curve[i].mean_abs_diff - oracle) <= kZ * curve[i].se;
    if (i > 0) ok = ok && curve[i].mean_abs_diff < curve[i - 1].mean_abs_diff;
    d += fmt("; gap %.3f: %.5f vs %.5f", curve[i].gap, curve[i].mean_abs_diff, oracle);
  }
  return {ok, d};
}

Outcome martingale() {
  const auto model = presets::cbi();
  const Engine e(model, config(1e-3, 100000, 808));
  const auto f = TestFunction::exp_neg();
  const auto table = std::make_shared<GeneratorTable>(e.dynamics(), f, 50.0);
  EnsembleOptions o;
  o.t_grid = {1.0};
  o.threads = kThreads;
  o.f = f.f;
  o.Lf = [table](double x) { return (*table)(x); };
  const auto r = run_ensemble(e, 1.0, o);
  const auto rep = martingale_residual(r, 0.01);
  return {rep.verdict == Verdict::Pass && std::fabs(r.residual_mean) <= kZ * r.residual_se + 0.01,
          fmt("mean residual %.3g, 3 SE + 0.01 = %.4g", r.residual_mean, kZ * r.residual_se + 0.01)};
}

Outcome gadget() {
  const Gadget g(PowerModulus{1.0, 0.5}, 10);
  double worst_a = 0.0, worst_part = 0.0, worst_env = -1.0;
  for (int k = 1; k <= 10; ++k) {
    worst_a = std::max(worst_a, std::fabs(g.a(k) / std::exp(-k * (k + 1) / 2.0) - 1.0));
    worst_part = std::max(worst_part, std::fabs(g.partition_integral(k) - k));
    worst_env = std::max(worst_env, gadget_envelope_excess(g, k));
  }
  cli::GadgetSpec spec;
  spec.samples = 1000;
  const auto suite = cli::run_gadget_suite(spec, 909);
  const auto violations = suite.metadata.at("violations");
  return {worst_a <= 1e-10 && worst_part <= 1e-6 && worst_env <= 0.0 && violations == "0" &&
              suite.verdict == Verdict::Pass,
          fmt("a_k rel err %.2g; partition err %.2g; envelope excess %.3g; ", worst_a, worst_part, worst_env) +
              "bound violations " + violations};
}

ModelSpec diffusion_only(ScalarFn sigma) {
  GeneralJump g;
  g.sigma = std::move(sigma);
  g.b = ScalarFn::zero();
  ModelSpec m;
  m.form = g;
  return m;
}

Outcome conditions() {
  const auto start = std::chrono::steady_clock::now();
  const auto pairs = default_pair_grid(10.0);
  const auto sq = fit_modulus(presets::cir(), pairs, ModulusTarget::SquareRho);
  const double gamma = sq.modulus_fit ? sq.modulus_fit->gamma : std::nan("");
  const bool cir_ok = sq.verdict == Verdict::Pass && gamma >= 0.98 && gamma <= 1.02;
  const bool frac_ok =
      fit_modulus(diffusion_only(ScalarFn::power(1.0, 0.2)), pairs, ModulusTarget::SquareRho).verdict == Verdict::Fail;
  GeneralJump g;
  g.sigma = ScalarFn::zero();
  g.b = ScalarFn::zero();
  g.h0 = RateKernel::linear(1.0);
  g.mu0 = JumpMeasure::stable(1.0, 1.5);
  ModelSpec lin;
  lin.form = g;
  const std::vector<double> marks{1e-3, 0.1, 1.0, 10.0};
  const bool mono_ok = check_monotone(lin, default_state_grid(10.0), marks).verdict == Verdict::Pass;
  bool alpha_ok = false;
  try {
    auto m = presets::cbi();
    std::get<CBI>(m.form).nu0 = JumpMeasure::stable(1.0, 2.0);
    m.compile();
  } catch (const Error& e) {
    alpha_ok = e.kind() == ErrorKind::Divergent || e.kind() == ErrorKind::InvalidAlpha;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {cir_ok && frac_ok && mono_ok && alpha_ok && secs < 30.0,
          fmt("sqrt(2x) gamma=%.4f; ", gamma) + "x^0.2 " + (frac_ok ? "fails" : "passes") + "; h0=x " +
              (mono_ok ? "monotone" : "not monotone") + "; alpha=2 " + (alpha_ok ? "rejected" : "accepted") +
              fmt("; %.2f s", secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome replay() {
  const fs::path root = fs::temp_directory_path() / "nnjump_acceptance_replay";
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(NNJUMP_SCENARIO_DIR)) {
    const auto stem = entry.path().stem().string();
    if (stem == "bad_alpha" || stem == "gadget") continue;
    std::string summaries[2];
    for (int i = 0; i < 2; ++i) {
      const auto dir = root / (stem + "_" + std::to_string(i));
      fs::remove_all(dir);
      const std::vector<std::string> args{"nnjump", "simulate", "--scenario", entry.path().string(),
                                          "--paths", "1000", "--threads", i == 0 ? "1" : "4",
                                          "--out", dir.string()};
      std::streambuf* old = std::cout.rdbuf(nullptr);
      const int code = cli::run(args);
      std::cout.rdbuf(old);
      if (code != 0) return {false, stem + ": simulate exited " + std::to_string(code)};
      summaries[i] = slurp(dir / "summary.json");
    }
    ++compared;
    if (summaries[0].empty() || summaries[0] != summaries[1]) ++differing;
  }
  return {compared > 0 && differing == 0,
          fmt("%.0f scenarios, %.0f differing summaries (threads 1 vs 4)", static_cast<double>(compared),
              static_cast<double>(differing))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"non-negativity", nonnegativity},
      {"first-moment bound", first_moment},
      {"CIR mean and Richardson", cir_mean},
      {"stable Laplace exponent", laplace},
      {"second-moment bound", second_moment},
      {"comparison ordering", comparison},
      {"continuous dependence", dependence},
      {"martingale residual", martingale},
      {"gadget suite", gadget},
      {"condition checker", conditions},
      {"replay across threads", replay},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
