#include "nnjump/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnjump/error.hpp"
#include "nnjump/kernels/kernels.hpp"

namespace nnjump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_divergent(double v, const std::string& what) {
  if (!std::isfinite(v) || v > kDivergenceThreshold) {
    fail(ErrorKind::Divergent, what + " is infinite; raise the cutoff eps");
  }
  return v;
}

class Recorder : public PathSink {
 public:
  explicit Recorder(std::vector<SimPath>& paths) : paths_(paths) {}
  void on_grid(double t, std::span<const double> x) override {
    for (std::size_t l = 0; l < x.size(); ++l) push(l, t, x[l]);
  }
  void on_jump(std::size_t lane, const AppliedJump& j) override {
    push(lane, j.event.time, j.post);
    paths_[lane].jumps.push_back(j);
  }

 private:
  void push(std::size_t l, double t, double v) {
    auto& p = paths_[l];
    if (!p.times.empty() && p.times.back() == t) {
      p.states.back() = v;
    } else {
      p.times.push_back(t);
      p.states.push_back(v);
    }
  }
  std::vector<SimPath>& paths_;
};

}  // namespace

void SimulationConfig::validate(double x0) const {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) fail(ErrorKind::InvalidArgument, "config.dt must be > 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    fail(ErrorKind::InvalidArgument, "config.horizon must be >= 0");
  }
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "config.eps must be > 0");
  if (n_paths == 0) fail(ErrorKind::InvalidArgument, "config.paths must be >= 1");
  if (max_doublings < 0) fail(ErrorKind::InvalidArgument, "config.max_doublings must be >= 0");
  if (!(x0 >= 0.0) || !std::isfinite(x0)) fail(ErrorKind::InvalidArgument, "config.x0 must be >= 0");
  if (!(m_cap > x0)) fail(ErrorKind::InvalidArgument, "config.m_cap must exceed the initial state");
}

double SimPath::at(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::fabs(t));
  auto it = std::upper_bound(times.begin(), times.end(), t + tol);
  if (it == times.begin()) return states.front();
  return states[static_cast<std::size_t>(it - times.begin()) - 1];
}

Engine::Engine(const ModelSpec& model, SimulationConfig cfg) : Engine(model.compile(), cfg) {}

Engine::Engine(Dynamics dynamics, SimulationConfig cfg) : dyn_(std::move(dynamics)), cfg_(cfg) { prepare(); }

void Engine::prepare() {
  plans_.clear();
  trunc_var_ = 0.0;
  for (const auto& ch : dyn_.channels) {
    Plan p;
    if (cfg_.exact_stable && ch.exact_stable()) {
      const auto& s = std::get<StablePowerLaw>(ch.measure.kind());
      p.exact = true;
      p.stable_alpha = s.alpha;
      p.stable_c = s.c;
      plans_.push_back(p);
      continue;
    }
    const bool truncate = !std::holds_alternative<CompoundPoisson>(ch.measure.kind());
    const double floor = ch.mark_floor();
    p.cutoff = std::max(truncate ? cfg_.eps : 0.0, floor);
    p.tail = finite_or_divergent(ch.measure.moment(0, p.cutoff, kInf), "jump rate of channel " + ch.name);
    if (ch.compensated()) {
      p.drift_coef = -finite_or_divergent(ch.measure.moment(1, p.cutoff, kInf),
                                          "compensator of channel " + ch.name);
      trunc_var_ += ch.measure.moment(2, floor, p.cutoff);
    } else {
      p.drift_coef = finite_or_divergent(ch.measure.moment(1, floor, p.cutoff),
                                         "small-jump mean of channel " + ch.name);
    }
    plans_.push_back(p);
  }
}

double Engine::envelope(std::size_t i, double m) const {
  const auto& ch = dyn_.channels[i];
  if (ch.action != JumpAction::Thinned) return 1.0;
  if (ch.monotone) return std::max(ch.rate.weight(m), ch.rate.weight(0.0));
  double sup = 0.0;
  constexpr int n = 1024;
  for (int k = 0; k <= n; ++k) sup = std::max(sup, ch.rate.weight(m * k / n));
  return sup * (1.0 + 1e-9);
}

double Engine::effective_drift(double x) const {
  double v = dyn_.drift(x);
  for (std::size_t i = 0; i < plans_.size(); ++i) {
    if (!plans_[i].exact && plans_[i].drift_coef != 0.0) {
      v += plans_[i].drift_coef * dyn_.channels[i].factor(x);
    }
  }
  return v;
}

RunStats Engine::run(std::span<double> x, std::uint64_t path_id, PathSink& sink, bool patched) const {
  const std::size_t L = x.size();
  const std::size_t C = dyn_.channels.size();
  const double dt = cfg_.dt_max;
  const double T = cfg_.horizon;
  PathStreams st(cfg_.root_seed, path_id);
  RunStats rs;
  double m = cfg_.m_cap;
  std::vector<double> coef(L);
  std::vector<double> H(C, 0.0), rate(C, 0.0), next(C, kInf);
  const bool sigma_on = !dyn_.sigma.is_zero();

  auto stream_of = [&](std::size_t c) -> RandomStream& {
    return dyn_.channels[c].noise == NoiseId::N0 ? st.jumps0 : st.jumps1;
  };
  auto set_rates = [&] {
    for (std::size_t c = 0; c < C; ++c) {
      if (plans_[c].exact) continue;
      H[c] = envelope(c, m);
      rate[c] = plans_[c].tail * H[c];
    }
  };
  auto arm = [&](double t) {
    for (std::size_t c = 0; c < C; ++c) {
      next[c] = (plans_[c].exact || !(rate[c] > 0.0)) ? kInf : t + stream_of(c).exponential() / rate[c];
    }
  };
  auto over_cap = [&] { return std::any_of(x.begin(), x.end(), [m](double v) { return v > m; }); };
  // Returns true when the event clocks were redrawn; sets hit_cap on a stop.
  auto handle_cap = [&](double t) {
    if (!over_cap()) return false;
    if (cfg_.cap_policy == CapPolicy::Extend) {
      while (over_cap() && rs.cap_doublings < static_cast<std::size_t>(cfg_.max_doublings)) {
        m *= 2.0;
        ++rs.cap_doublings;
      }
      if (!over_cap()) {
        set_rates();
        arm(t);
        return true;
      }
    }
    rs.hit_cap = true;
    rs.stop_time = t;
    sink.on_stop(t);
    return true;
  };
  auto continuous = [&](double h) {
    if (sigma_on) {
      const double dB = std::sqrt(h) * st.brownian.normal();
      for (std::size_t l = 0; l < L; ++l) coef[l] = dyn_.sigma(x[l]);
      rs.clamp_count += kernels::clamped_axpy(x, coef, dB);
    }
    for (std::size_t c = 0; c < C; ++c) {
      if (!plans_[c].exact) continue;
      const double dZ = stable_increment(stream_of(c), plans_[c].stable_alpha, plans_[c].stable_c, h);
      for (std::size_t l = 0; l < L; ++l) coef[l] = dyn_.channels[c].exact_factor(x[l]);
      rs.clamp_count += kernels::clamped_axpy(x, coef, dZ);
    }
    for (std::size_t l = 0; l < L; ++l) coef[l] = effective_drift(x[l]);
    rs.clamp_count += kernels::clamped_axpy(x, coef, h);
  };
  // Applies the event of channel c at t; returns true if it restarts the grid.
  auto event = [&](std::size_t c, double t) {
    const auto& ch = dyn_.channels[c];
    const double z = ch.measure.sample_above(plans_[c].cutoff, stream_of(c).uniform());
    const double u = ch.action == JumpAction::Thinned ? st.thinning.uniform() : 0.0;
    bool any = false;
    for (std::size_t l = 0; l < L; ++l) {
      const double pre = x[l];
      double post = pre;
      switch (ch.action) {
        case JumpAction::Thinned: {
          const double g = ch.rate(pre, z);
          if (g > H[c] * (1.0 + 1e-12)) {
            fail(ErrorKind::RateExceedsDominator,
                 "channel " + ch.name + ": rate at x = " + std::to_string(pre) +
                     " exceeds the envelope at the localization level");
          }
          if (u * H[c] < g) post = pre + z;
          break;
        }
        case JumpAction::Scaled: post = pre + ch.scale(pre) * z; break;
        case JumpAction::Proportional: post = pre - pre * z; break;
      }
      if (post != pre) {
        x[l] = post;
        AppliedJump aj;
        aj.event = JumpEvent{t, post - pre, ch.noise, ch.compensated()};
        aj.channel = c;
        aj.pre = pre;
        aj.post = post;
        sink.on_jump(l, aj);
        any = true;
      }
    }
    if (any) sink.on_event(t, std::span<const double>(x.data(), L));
    next[c] = t + stream_of(c).exponential() / rate[c];
    return patched && any && !ch.compensated() && ch.measure.is_finite();
  };

  set_rates();
  arm(0.0);
  sink.on_grid(0.0, std::span<const double>(x.data(), L));
  if (handle_cap(0.0) && rs.hit_cap) {
    rs.final_cap = m;
    return rs;
  }
  if (!(T > 0.0)) {
    rs.final_cap = m;
    return rs;
  }

  double t = 0.0;
  double origin = 0.0;
  std::uint64_t i = 0;
  for (;;) {
    double tg = origin + static_cast<double>(i + 1) * dt;
    if (tg >= T - 1e-9 * dt) tg = T;
    std::size_t ce = 0;
    double te = kInf;
    for (std::size_t c = 0; c < C; ++c) {
      if (next[c] < te) {
        te = next[c];
        ce = c;
      }
    }
    const double tn = std::min(tg, te);
    if (tn > t) continuous(tn - t);
    t = tn;
    bool rearmed = handle_cap(t);
    if (rs.hit_cap) break;
    const bool grid_hit = tg <= te;
    bool reset = false;
    if (te <= tg && !rearmed) {
      reset = event(ce, t);
      handle_cap(t);
      if (rs.hit_cap) break;
    }
    if (reset) {
      origin = t;
      i = 0;
    }
    if (grid_hit) {
      sink.on_grid(t, std::span<const double>(x.data(), L));
      if (!reset) ++i;
      if (t >= T) break;
    }
  }
  rs.final_cap = m;
  return rs;
}

namespace {

std::vector<SimPath> run_recorded(const Engine& engine, std::span<const double> x0, std::uint64_t path_id,
                                  bool patched) {
  for (double v : x0) engine.config().validate(v);
  std::vector<SimPath> paths(x0.size());
  const auto expected = static_cast<std::size_t>(engine.config().horizon / engine.config().dt_max) + 2;
  for (auto& p : paths) {
    p.path_id = path_id;
    p.times.reserve(expected);
    p.states.reserve(expected);
  }
  std::vector<double> x(x0.begin(), x0.end());
  Recorder rec(paths);
  const RunStats rs = engine.run(x, path_id, rec, patched);
  for (auto& p : paths) {
    p.clamp_count = rs.clamp_count;
    p.cap_doublings = rs.cap_doublings;
    p.exit = rs.hit_cap ? ExitKind::HitCap : ExitKind::Completed;
    p.exit_time = rs.hit_cap ? rs.stop_time : engine.config().horizon;
  }
  return paths;
}

}  // namespace

SimPath simulate_path(const Engine& engine, double x0, std::uint64_t path_id) {
  const double v[1] = {x0};
  return std::move(run_recorded(engine, v, path_id, false).front());
}

SimPath simulate_path(const ModelSpec& model, const SimulationConfig& cfg, double x0, std::uint64_t path_id) {
  return simulate_path(Engine(model, cfg), x0, path_id);
}

SimPath simulate_patched(const Engine& engine, double x0, std::uint64_t path_id) {
  const double v[1] = {x0};
  return std::move(run_recorded(engine, v, path_id, true).front());
}

SimPath simulate_patched(const ModelSpec& model, const SimulationConfig& cfg, double x0,
                         std::uint64_t path_id) {
  return simulate_patched(Engine(model, cfg), x0, path_id);
}

std::vector<SimPath> simulate_lockstep(const Engine& engine, std::span<const double> x0, std::uint64_t path_id) {
  return run_recorded(engine, x0, path_id, false);
}

CoupledPaths simulate_coupled(const Engine& engine, double x0_low, double x0_high, std::uint64_t path_id) {
  if (!(x0_low <= x0_high)) fail(ErrorKind::InvalidArgument, "coupling needs x0_low <= x0_high");
  const double v[2] = {x0_low, x0_high};
  auto paths = run_recorded(engine, v, path_id, false);
  CoupledPaths out;
  out.low = std::move(paths[0]);
  out.high = std::move(paths[1]);
  out.root_seed = engine.config().root_seed;
  out.path_id = path_id;
  return out;
}

CoupledPaths simulate_coupled(const ModelSpec& model, const SimulationConfig& cfg, double x0_low,
                              double x0_high, std::uint64_t path_id, bool skip_validation) {
  if (!skip_validation && !model.monotone()) {
    fail(ErrorKind::MonotonicityUnverified,
         "model " + model.name + ": coupling needs rates declared non-decreasing in x (model.monotone)");
  }
  return simulate_coupled(Engine(model, cfg), x0_low, x0_high, path_id);
}

MomentSummary moment_summary(std::span<const SimPath> paths, double t) {
  MomentSummary s;
  s.n = paths.size();
  if (paths.empty()) fail(ErrorKind::InvalidArgument, "moment summary needs at least one path");
  std::vector<double> v(paths.size()), v2(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    v[i] = paths[i].at(t);
    v2[i] = v[i] * v[i];
  }
  const double n = static_cast<double>(s.n);
  s.mean = kernels::sum(v) / n;
  s.second = kernels::sum(v2) / n;
  if (s.n > 1) {
    s.se_mean = std::sqrt(kernels::sum_sq_dev(v, s.mean) / (n - 1.0) / n);
    s.se_second = std::sqrt(kernels::sum_sq_dev(v2, s.second) / (n - 1.0) / n);
  }
  return s;
}

std::vector<double> refined_terminal_values(const Engine& engine, double x0, std::uint64_t path_id,
                                            int levels) {
  if (levels < 1 || levels > 16) fail(ErrorKind::InvalidArgument, "refinement levels must be in [1, 16]");
  if (!engine.dynamics().channels.empty()) {
    fail(ErrorKind::InvalidArgument, "refined terminal values support jump-free models only");
  }
  const auto& cfg = engine.config();
  cfg.validate(x0);
  const auto& sigma = engine.dynamics().sigma;
  const auto n0 = static_cast<std::uint64_t>(std::max(1.0, std::ceil(cfg.horizon / cfg.dt_max - 1e-9)));
  const std::uint64_t nf = n0 << (levels - 1);
  const double hf = cfg.horizon / static_cast<double>(nf);
  RandomStream bm(cfg.root_seed, path_id, StreamChannel::Brownian);
  std::vector<double> x(levels, x0), acc(levels, 0.0);
  for (std::uint64_t k = 0; k < nf; ++k) {
    const double dW = std::sqrt(hf) * bm.normal();
    for (int j = 0; j < levels; ++j) {
      acc[j] += dW;
      const std::uint64_t stride = std::uint64_t{1} << (levels - 1 - j);
      if ((k + 1) % stride != 0) continue;
      const double h = hf * static_cast<double>(stride);
      double v = x[j] + sigma(x[j]) * acc[j];
      v = v < 0.0 ? 0.0 : v;
      v = v + engine.effective_drift(v) * h;
      x[j] = v < 0.0 ? 0.0 : v;
      acc[j] = 0.0;
    }
  }
  return x;
}

}  // namespace nnjump
