#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nnjump/model.hpp"
#include "nnjump/samplers.hpp"

namespace nnjump {

enum class CapPolicy { Stop, Extend };

struct SimulationConfig {
  double dt_max = 1e-3;
  double horizon = 1.0;
  std::size_t n_paths = 1000;
  /// Big-jump cutoff for infinite (and tabulated) measures.
  double eps = 0.01;
  /// Localization level.
  double m_cap = 1e4;
  std::uint64_t root_seed = 1;
  CapPolicy cap_policy = CapPolicy::Extend;
  int max_doublings = 20;
  /// Sample stable compensated noise as one exact increment per step.
  bool exact_stable = true;

  /// Throws InvalidArgument naming the offending field.
  void validate(double x0) const;
  bool operator==(const SimulationConfig&) const = default;
};

struct AppliedJump {
  JumpEvent event;
  std::size_t channel = 0;
  double pre = 0.0;
  double post = 0.0;
};

enum class ExitKind { Completed, HitCap };

struct SimPath {
  std::uint64_t path_id = 0;
  std::vector<double> times;
  std::vector<double> states;
  std::vector<AppliedJump> jumps;
  ExitKind exit = ExitKind::Completed;
  double exit_time = 0.0;
  std::size_t clamp_count = 0;
  std::size_t cap_doublings = 0;

  /// Cadlag value at time t (last record at or before t).
  double at(double t) const;
};

struct CoupledPaths {
  SimPath low;
  SimPath high;
  std::uint64_t root_seed = 0;
  std::uint64_t path_id = 0;
};

/// Observer of a lockstep run over several lanes sharing one noise.
class PathSink {
 public:
  virtual ~PathSink() = default;
  /// State of all lanes at a grid time (including t = 0 and the horizon).
  virtual void on_grid(double /*t*/, std::span<const double> /*x*/) {}
  /// One lane jumped at t from pre to post.
  virtual void on_jump(std::size_t /*lane*/, const AppliedJump& /*j*/) {}
  /// All lanes after an event at which at least one lane jumped.
  virtual void on_event(double /*t*/, std::span<const double> /*x*/) {}
  /// The run halted at t (localization level reached under Stop).
  virtual void on_stop(double /*t*/) {}
};

struct RunStats {
  std::size_t clamp_count = 0;
  std::size_t cap_doublings = 0;
  bool hit_cap = false;
  double stop_time = 0.0;
  double final_cap = 0.0;
};

/// A compiled model plus the per-channel simulation plan.
class Engine {
 public:
  Engine(const ModelSpec& model, SimulationConfig cfg);
  Engine(Dynamics dynamics, SimulationConfig cfg);

  const Dynamics& dynamics() const { return dyn_; }
  const SimulationConfig& config() const { return cfg_; }

  /// Advance all lanes of x from 0 to the horizon with shared noise drawn
  /// from the streams of path_id. With `patched`, raw finite-rate channels
  /// restart the time grid at each of their jumps.
  RunStats run(std::span<double> x, std::uint64_t path_id, PathSink& sink, bool patched = false) const;

  /// Drift used between events: b minus big-jump compensators plus the mean
  /// of folded raw small jumps.
  double effective_drift(double x) const;
  /// Per unit time variance of the dropped compensated small jumps.
  double truncation_variance_rate() const { return trunc_var_; }
  /// Whether channel i is sampled through exact stable increments.
  bool channel_exact(std::size_t i) const { return plans_[i].exact; }

 private:
  struct Plan {
    bool exact = false;
    double cutoff = 0.0;     // lowest simulated mark
    double tail = 0.0;       // mu((cutoff, inf))
    double drift_coef = 0.0; // multiplies factor(x) in the effective drift
    double stable_alpha = 0.0;
    double stable_c = 0.0;
  };
  Dynamics dyn_;
  SimulationConfig cfg_;
  std::vector<Plan> plans_;
  double trunc_var_ = 0.0;

  void prepare();
  double envelope(std::size_t i, double m) const;
};

SimPath simulate_path(const ModelSpec& model, const SimulationConfig& cfg, double x0,
                      std::uint64_t path_id);
SimPath simulate_path(const Engine& engine, double x0, std::uint64_t path_id);

SimPath simulate_patched(const ModelSpec& model, const SimulationConfig& cfg, double x0,
                         std::uint64_t path_id);
SimPath simulate_patched(const Engine& engine, double x0, std::uint64_t path_id);

/// Shared-noise pair. Throws MonotonicityUnverified unless the model declares
/// monotone rates or `skip_validation` is set.
CoupledPaths simulate_coupled(const ModelSpec& model, const SimulationConfig& cfg, double x0_low,
                              double x0_high, std::uint64_t path_id, bool skip_validation = false);
CoupledPaths simulate_coupled(const Engine& engine, double x0_low, double x0_high,
                              std::uint64_t path_id);

/// Lanes started at each x0, recorded as separate paths with shared noise.
std::vector<SimPath> simulate_lockstep(const Engine& engine, std::span<const double> x0,
                                       std::uint64_t path_id);

struct MomentSummary {
  double mean = 0.0;
  double second = 0.0;
  double se_mean = 0.0;
  double se_second = 0.0;
  std::size_t n = 0;
};

/// Sample mean and second moment of x(t) with cadlag lookup.
MomentSummary moment_summary(std::span<const SimPath> paths, double t);

/// Terminal values of one path at step sizes dt, dt/2, ..., dt/2^{levels-1}
/// driven by one Brownian path (common random numbers). Jump-free models only.
std::vector<double> refined_terminal_values(const Engine& engine, double x0, std::uint64_t path_id,
                                            int levels);

}  // namespace nnjump
