#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nnjump/engine.hpp"

namespace nnjump {

/// Calls fn(i) for i in [0, n) on `threads` workers with static chunks.
/// Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct EnsembleOptions {
  std::vector<double> t_grid;
  unsigned threads = 1;
  /// Optional martingale residual f(x(T)) - f(x0) - int_0^T Lf(x(s)) ds.
  std::function<double(double)> f;
  std::function<double(double)> Lf;
  bool patched = false;
};

struct TimeStats {
  double t = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;
  double second = 0.0;
  double second_se = 0.0;
  /// E[sup_{s <= t} x(s)^2] over recorded states.
  double sup_second = 0.0;
  double sup_second_se = 0.0;
};

struct EnsembleResult {
  std::size_t n_paths = 0;
  double x0 = 0.0;
  std::vector<TimeStats> stats;
  bool has_residual = false;
  double residual_mean = 0.0;
  double residual_se = 0.0;
  std::size_t clamp_count = 0;
  std::size_t cap_events = 0;
  std::size_t capped_paths = 0;
  double min_state = 0.0;
};

/// Streams cfg.n_paths single-lane paths; the result does not depend on the
/// number of threads.
EnsembleResult run_ensemble(const Engine& engine, double x0, const EnsembleOptions& opt);

struct CoupledOptions {
  std::vector<double> x0;  ///< one lane per initial value
  std::size_t reference = 0;
  double t = 0.0;
  unsigned threads = 1;
  /// Count times where lane l exceeds lane l+1 by more than tol.
  bool check_order = false;
  double tol = 1e-12;
};

struct CoupledResult {
  std::size_t n_paths = 0;
  /// E|x_l(t) - x_ref(t)| and its standard error, per lane.
  std::vector<double> mean_abs_diff;
  std::vector<double> se_abs_diff;
  std::vector<double> mean;
  std::size_t violations = 0;
  std::size_t checks = 0;
  std::size_t paths_with_violation = 0;
  std::size_t clamp_count = 0;
};

CoupledResult run_coupled_ensemble(const Engine& engine, const CoupledOptions& opt);

}  // namespace nnjump
