#include <algorithm>
#include <cmath>

#include "nnjump/analysis.hpp"
#include "nnjump/error.hpp"
#include "nnjump/kernels/kernels.hpp"

namespace nnjump {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  if (v.empty()) return r;
  const double n = static_cast<double>(v.size());
  r.mean = kernels::sum(v) / n;
  if (v.size() > 1) r.se = std::sqrt(kernels::sum_sq_dev(v, r.mean) / (n - 1.0) / n);
  return r;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::MomentBound1: return "moment1";
    case DiagnosticKind::MomentBound2: return "moment2";
    case DiagnosticKind::MartingaleResidual: return "martingale";
    case DiagnosticKind::Comparison: return "comparison";
    case DiagnosticKind::ContinuousDependence: return "dependence";
    case DiagnosticKind::GadgetBounds: return "gadget";
    case DiagnosticKind::Richardson: return "richardson";
  }
  return "?";
}

double path_residual(const SimPath& p, const std::function<double(double)>& f,
                     const std::function<double(double)>& Lf, double t) {
  if (p.times.empty()) return 0.0;
  double integral = 0.0;
  std::size_t j = 0;
  double prev_t = p.times[0];
  double prev_lf = Lf(p.states[0]);
  double last = p.states[0];
  for (std::size_t i = 1; i < p.times.size() && p.times[i] <= t + 1e-12 * std::max(1.0, t); ++i) {
    const double ti = p.times[i];
    while (j < p.jumps.size() && p.jumps[j].event.time < ti - 1e-15) ++j;
    double pre = p.states[i];
    if (j < p.jumps.size() && std::fabs(p.jumps[j].event.time - ti) <= 1e-15 * std::max(1.0, ti)) {
      pre = p.jumps[j].pre;
    }
    const double lf_pre = Lf(pre);
    integral += 0.5 * (prev_lf + lf_pre) * (ti - prev_t);
    prev_lf = pre == p.states[i] ? lf_pre : Lf(p.states[i]);
    prev_t = ti;
    last = p.states[i];
  }
  return f(last) - f(p.states[0]) - integral;
}

DiagnosticsReport martingale_residual(const ModelSpec& model, const TestFunction& f,
                                      std::span<const SimPath> paths, double t, double budget) {
  const Dynamics d = model.compile();
  double top = 0.0;
  for (const auto& p : paths) {
    for (double v : p.states) top = std::max(top, v);
  }
  const GeneratorTable Lf(d, f, std::max(1.0, top));
  std::vector<double> r(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) r[i] = path_residual(paths[i], f.f, Lf, t);
  const MeanSe m = mean_se(r);
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::MartingaleResidual;
  rep.statistic = m.mean;
  rep.band_lo = -(3.0 * m.se + budget);
  rep.band_hi = 3.0 * m.se + budget;
  rep.verdict = std::fabs(m.mean) <= rep.band_hi ? Verdict::Pass : Verdict::Fail;
  rep.metadata["f"] = f.name;
  rep.metadata["paths"] = std::to_string(paths.size());
  rep.metadata["se"] = num(m.se);
  return rep;
}

DiagnosticsReport martingale_residual(const EnsembleResult& r, double budget) {
  if (!r.has_residual) fail(ErrorKind::InvalidArgument, "ensemble was run without a test function");
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::MartingaleResidual;
  rep.statistic = r.residual_mean;
  rep.band_hi = 3.0 * r.residual_se + budget;
  rep.band_lo = -rep.band_hi;
  rep.verdict = std::fabs(r.residual_mean) <= rep.band_hi ? Verdict::Pass : Verdict::Fail;
  rep.metadata["paths"] = std::to_string(r.n_paths);
  rep.metadata["se"] = num(r.residual_se);
  return rep;
}

double first_moment_bound(double x0, double K, double t) { return (1.0 + x0) * std::exp(K * t); }

double second_moment_bound(double x0, double K, double t) {
  return 6.0 * x0 * x0 + 24.0 * K * t + 6.0 * K * K * t * t;
}

DiagnosticsReport audit_first_moment(const EnsembleResult& r, double K) {
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::MomentBound1;
  rep.verdict = Verdict::Pass;
  rep.statistic = -std::numeric_limits<double>::infinity();
  for (const auto& s : r.stats) {
    const double lhs = 1.0 + s.mean;
    const double bound = first_moment_bound(r.x0, K, s.t);
    const double excess = lhs - bound - 3.0 * s.se;
    rep.rows.push_back({s.t, lhs, s.se, bound});
    if (excess > rep.statistic) {
      rep.statistic = excess;
      rep.band_hi = 3.0 * s.se;
    }
    if (excess > 0.0) rep.verdict = Verdict::Fail;
  }
  rep.metadata["K"] = num(K);
  rep.note = "statistic is max over t of mean(1+x) - bound - 3 SE";
  return rep;
}

DiagnosticsReport audit_second_moment(const EnsembleResult& r, double K, bool use_sup) {
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::MomentBound2;
  rep.verdict = Verdict::Pass;
  rep.statistic = -std::numeric_limits<double>::infinity();
  for (const auto& s : r.stats) {
    const double lhs = use_sup ? s.sup_second : s.second;
    const double se = use_sup ? s.sup_second_se : s.second_se;
    const double bound = second_moment_bound(r.x0, K, s.t);
    const double excess = lhs - bound - 3.0 * se;
    rep.rows.push_back({s.t, lhs, se, bound});
    if (excess > rep.statistic) {
      rep.statistic = excess;
      rep.band_hi = 3.0 * se;
    }
    if (excess > 0.0) rep.verdict = Verdict::Fail;
  }
  rep.metadata["K"] = num(K);
  rep.metadata["mode"] = use_sup ? "running sup" : "pointwise";
  rep.note = "statistic is max over t of mean(x^2) - bound - 3 SE";
  return rep;
}

DiagnosticsReport audit_moment_bounds(std::span<const SimPath> paths, double x0, double K1, double K2,
                                      std::span<const double> t_grid) {
  if (paths.empty()) fail(ErrorKind::InvalidArgument, "moment audit needs paths");
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::MomentBound1;
  rep.verdict = Verdict::Pass;
  rep.statistic = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    const MomentSummary m = moment_summary(paths, t);
    const double b1 = first_moment_bound(x0, K1, t);
    const double b2 = second_moment_bound(x0, K2, t);
    const double e1 = 1.0 + m.mean - b1 - 3.0 * m.se_mean;
    const double e2 = m.second - b2 - 3.0 * m.se_second;
    rep.rows.push_back({t, 1.0 + m.mean, m.se_mean, b1, m.second, m.se_second, b2});
    rep.statistic = std::max({rep.statistic, e1, e2});
    if (e1 > 0.0 || e2 > 0.0) rep.verdict = Verdict::Fail;
  }
  rep.metadata["K1"] = num(K1);
  rep.metadata["K2"] = num(K2);
  return rep;
}

std::size_t count_exceedances(const SimPath& low, const SimPath& high, double tol) {
  std::vector<double> times;
  std::merge(low.times.begin(), low.times.end(), high.times.begin(), high.times.end(), std::back_inserter(times));
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::size_t n = 0;
  for (double t : times) {
    if (low.at(t) > high.at(t) + tol) ++n;
  }
  return n;
}

namespace {

DiagnosticsReport comparison_report(std::size_t violations, std::size_t checks, std::size_t pairs,
                                    bool sufficient, bool declared) {
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::Comparison;
  rep.statistic = checks > 0 ? static_cast<double>(violations) / static_cast<double>(checks) : 0.0;
  rep.band_hi = sufficient ? 0.0 : 1e-3;
  rep.verdict = sufficient ? (violations == 0 ? Verdict::Pass : Verdict::Fail)
                           : (rep.statistic < 1e-3 ? Verdict::Pass : Verdict::Fail);
  rep.metadata["violations"] = std::to_string(violations);
  rep.metadata["checks"] = std::to_string(checks);
  rep.metadata["pairs"] = std::to_string(pairs);
  if (!declared) {
    rep.metadata["provenance"] = "MonotonicityUnverified";
    rep.note = "rates not declared monotone; coupling run without validation";
  } else if (!sufficient) {
    rep.note = "discrete sufficient condition not met; statistical bound applied";
  }
  return rep;
}

}  // namespace

DiagnosticsReport comparison_audit(std::span<const CoupledPaths> pairs, bool sufficient_condition,
                                   bool monotone_declared) {
  std::size_t v = 0, checks = 0;
  for (const auto& p : pairs) {
    v += count_exceedances(p.low, p.high);
    std::vector<double> times;
    std::merge(p.low.times.begin(), p.low.times.end(), p.high.times.begin(), p.high.times.end(),
               std::back_inserter(times));
    checks += static_cast<std::size_t>(std::unique(times.begin(), times.end()) - times.begin());
  }
  return comparison_report(v, checks, pairs.size(), sufficient_condition, monotone_declared);
}

DiagnosticsReport comparison_audit(const CoupledResult& r, bool sufficient_condition, bool monotone_declared) {
  return comparison_report(r.violations, r.checks, r.n_paths, sufficient_condition, monotone_declared);
}

DiagnosticsReport dependence_curve(const Engine& engine, double x0_star, std::span<const double> x0_list,
                                   double t, unsigned threads, std::vector<DependencePoint>* curve) {
  CoupledOptions opt;
  opt.x0.push_back(x0_star);
  opt.x0.insert(opt.x0.end(), x0_list.begin(), x0_list.end());
  opt.reference = 0;
  opt.t = t;
  opt.threads = threads;
  const CoupledResult r = run_coupled_ensemble(engine, opt);
  std::vector<DependencePoint> pts;
  for (std::size_t i = 0; i < x0_list.size(); ++i) {
    pts.push_back({std::fabs(x0_list[i] - x0_star), r.mean_abs_diff[i + 1], r.se_abs_diff[i + 1]});
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.gap > b.gap; });
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::ContinuousDependence;
  rep.verdict = Verdict::Pass;
  rep.statistic = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.rows.push_back({pts[i].gap, pts[i].mean_abs_diff, pts[i].se});
    if (i == 0) continue;
    const double slack = 3.0 * std::hypot(pts[i].se, pts[i - 1].se);
    const double rise = pts[i].mean_abs_diff - pts[i - 1].mean_abs_diff;
    if (rise - slack > rep.statistic) {
      rep.statistic = rise - slack;
      rep.band_hi = slack;
    }
    if (rise > slack) rep.verdict = Verdict::Fail;
  }
  if (pts.size() < 2) rep.statistic = 0.0;
  rep.metadata["t"] = num(t);
  rep.metadata["paths"] = std::to_string(r.n_paths);
  rep.note = "statistic is the largest rise of the curve beyond 3 combined SE";
  if (curve) *curve = pts;
  return rep;
}

DiagnosticsReport richardson_check(const Engine& engine, double x0, unsigned threads) {
  const std::size_t n = engine.config().n_paths;
  std::vector<double> d1(n), d2(n), mix(n);
  parallel_for(n, threads, [&](std::size_t p) {
    const auto v = refined_terminal_values(engine, x0, p, 3);
    d1[p] = v[0] - v[1];
    d2[p] = v[1] - v[2];
  });
  const MeanSe b1 = mean_se(d1);
  const MeanSe b2 = mean_se(d2);
  const double sgn2 = b2.mean < 0.0 ? -1.0 : 1.0;
  const double sgn1 = b1.mean < 0.0 ? -1.0 : 1.0;
  for (std::size_t p = 0; p < n; ++p) mix[p] = sgn2 * d2[p] - 0.5 * sgn1 * d1[p];
  const MeanSe m = mean_se(mix);
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::Richardson;
  rep.statistic = std::fabs(b2.mean) - 0.5 * std::fabs(b1.mean);
  rep.band_hi = 3.0 * m.se;
  rep.band_lo = -rep.band_hi;
  rep.verdict = rep.statistic <= rep.band_hi ? Verdict::Pass : Verdict::Fail;
  rep.rows.push_back({engine.config().dt_max, b1.mean, b1.se});
  rep.rows.push_back({engine.config().dt_max / 2.0, b2.mean, b2.se});
  rep.metadata["B1"] = num(b1.mean);
  rep.metadata["B2"] = num(b2.mean);
  rep.note = "bias estimates from common random numbers at dt, dt/2, dt/4";
  return rep;
}

}  // namespace nnjump
