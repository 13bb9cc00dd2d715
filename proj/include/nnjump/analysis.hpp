#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nnjump/conditions.hpp"
#include "nnjump/engine.hpp"
#include "nnjump/ensemble.hpp"
#include "nnjump/quadrature.hpp"

namespace nnjump {

/// A C^2 test function with its first two derivatives.
struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  struct Certificate {
    double range = 0.0;
    double sup_f = 0.0;
    double sup_df = 0.0;
    double sup_d2f = 0.0;
  };
  /// Sup norms of f, f', f'' on [0, range] (grid of 4097 points). Throws
  /// InvalidArgument if any value is not finite.
  Certificate certify(double range) const;

  static TestFunction identity();
  static TestFunction square();
  static TestFunction exp_neg();
  static TestFunction constant(double c = 1.0);
  /// a f + g.
  static TestFunction combine(double a, const TestFunction& f, const TestFunction& g);
};

/// Jumps below this size use the second-order Taylor term.
inline constexpr double kTaylorCutoff = 1e-4;
inline constexpr quad::Tolerance kGeneratorTolerance{1e-9, 1e-10};

/// Lf(x) = 1/2 sigma^2 f'' + b f' + sum over channels of
/// int [f(x+J) - f(x) - J f'(x)] w mu (compensated) or int [f(x+J) - f(x)] w mu (raw).
double apply_generator(const Dynamics& d, const TestFunction& f, double x);
double apply_generator(const ModelSpec& model, const TestFunction& f, double x);

/// Lf tabulated on [0, range] and interpolated by a cubic B-spline; states
/// outside the range fall back to direct evaluation.
class GeneratorTable {
 public:
  GeneratorTable(const Dynamics& d, const TestFunction& f, double range, std::size_t nodes = 1025);
  double operator()(double x) const;
  double range() const { return range_; }

 private:
  struct Spline;
  Dynamics dyn_;
  TestFunction f_;
  double range_;
  std::shared_ptr<const Spline> spline_;
};

enum class DiagnosticKind {
  MomentBound1,
  MomentBound2,
  MartingaleResidual,
  Comparison,
  ContinuousDependence,
  GadgetBounds,
  Richardson,
};

std::string to_string(DiagnosticKind k);

struct DiagnosticsReport {
  DiagnosticKind kind = DiagnosticKind::MartingaleResidual;
  double statistic = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  Verdict verdict = Verdict::Fail;
  std::map<std::string, std::string> metadata;
  /// Per-time or per-point rows backing the statistic.
  std::vector<std::vector<double>> rows;
  std::string note;
};

/// f(x(t)) - f(x(0)) - int_0^t Lf(x(s)) ds for one path, trapezoid over the
/// recorded grid with pre-jump values at jump times.
double path_residual(const SimPath& p, const std::function<double(double)>& f,
                     const std::function<double(double)>& Lf, double t);

/// Mean residual over paths; Pass iff |mean| <= 3 SE + budget.
DiagnosticsReport martingale_residual(const ModelSpec& model, const TestFunction& f,
                                      std::span<const SimPath> paths, double t, double budget = 0.0);
/// Same verdict from a streamed ensemble run with f and Lf set.
DiagnosticsReport martingale_residual(const EnsembleResult& r, double budget = 0.0);

double first_moment_bound(double x0, double K, double t);
double second_moment_bound(double x0, double K, double t);

/// mean(1 + x(t)) <= (1 + x0) e^{Kt} + 3 SE at every recorded t.
DiagnosticsReport audit_first_moment(const EnsembleResult& r, double K);
/// mean(x(t)^2) <= 6 x0^2 + 24Kt + 6K^2t^2 + 3 SE; with `use_sup` the running
/// sup of x^2 is audited instead.
DiagnosticsReport audit_second_moment(const EnsembleResult& r, double K, bool use_sup = false);
/// Both audits on stored paths at each t in t_grid; Pass iff all pass.
DiagnosticsReport audit_moment_bounds(std::span<const SimPath> paths, double x0, double K1, double K2,
                                      std::span<const double> t_grid);

/// Grid times (union over both paths) where low > high + tol.
std::size_t count_exceedances(const SimPath& low, const SimPath& high, double tol = 1e-12);

/// Violation fraction over pairs. Under the discrete sufficient condition
/// Pass needs zero violations, otherwise a fraction below 1e-3.
DiagnosticsReport comparison_audit(std::span<const CoupledPaths> pairs, bool sufficient_condition = true,
                                   bool monotone_declared = true);
DiagnosticsReport comparison_audit(const CoupledResult& r, bool sufficient_condition = true,
                                   bool monotone_declared = true);

struct DependencePoint {
  double gap = 0.0;
  double mean_abs_diff = 0.0;
  double se = 0.0;
};

/// E|x(t; x0_i) - x(t; x0*)| under one shared noise, sorted by decreasing gap.
/// Pass iff each value is at most the previous one plus 3 combined SE.
DiagnosticsReport dependence_curve(const Engine& engine, double x0_star, std::span<const double> x0_list,
                                   double t, unsigned threads, std::vector<DependencePoint>* curve = nullptr);

/// Richardson check on a jump-free model: bias estimates B1 = m(h) - m(h/2)
/// and B2 = m(h/2) - m(h/4) from one Brownian path per sample. Pass iff
/// |B2| <= |B1| / 2 + 3 SE.
DiagnosticsReport richardson_check(const Engine& engine, double x0, unsigned threads);

}  // namespace nnjump
