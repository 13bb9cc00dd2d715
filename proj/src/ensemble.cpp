#include "nnjump/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "nnjump/error.hpp"
#include "nnjump/kernels/kernels.hpp"

namespace nnjump {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// One path's statistics at the requested times, plus the trapezoid residual.
class StatSink : public PathSink {
 public:
  StatSink(const std::vector<double>& grid, const EnsembleOptions& opt, double x0)
      : grid_(grid), opt_(opt), vals_(grid.size(), x0), sups_(grid.size(), x0 * x0) {
    cur_ = x0;
    sup_ = x0 * x0;
    min_ = x0;
    if (opt_.Lf) last_lf_ = opt_.Lf(x0);
  }

  void on_grid(double t, std::span<const double> x) override { record(t, x[0], x[0]); }
  void on_jump(std::size_t, const AppliedJump& j) override { record(j.event.time, j.pre, j.post); }

  void finish() {
    for (; k_ < grid_.size(); ++k_) {
      vals_[k_] = cur_;
      sups_[k_] = sup_;
    }
  }

  const std::vector<double>& values() const { return vals_; }
  const std::vector<double>& sups() const { return sups_; }
  double integral() const { return integral_; }
  double last() const { return cur_; }
  double min_state() const { return min_; }

 private:
  void record(double s, double pre, double post) {
    while (k_ < grid_.size() && grid_[k_] + 1e-12 * std::max(1.0, grid_[k_]) < s) {
      vals_[k_] = cur_;
      sups_[k_] = sup_;
      ++k_;
    }
    if (opt_.Lf) {
      const double lf_pre = opt_.Lf(pre);
      integral_ += 0.5 * (last_lf_ + lf_pre) * (s - last_t_);
      last_lf_ = post == pre ? lf_pre : opt_.Lf(post);
    }
    last_t_ = s;
    cur_ = post;
    sup_ = std::max({sup_, pre * pre, post * post});
    min_ = std::min({min_, pre, post});
  }

  const std::vector<double>& grid_;
  const EnsembleOptions& opt_;
  std::vector<double> vals_, sups_;
  std::size_t k_ = 0;
  double cur_ = 0.0, sup_ = 0.0, min_ = 0.0;
  double last_t_ = 0.0, last_lf_ = 0.0, integral_ = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  const double n = static_cast<double>(v.size());
  if (v.empty()) return r;
  r.mean = kernels::sum(v) / n;
  if (v.size() > 1) {
    r.var = kernels::sum_sq_dev(v, r.mean) / (n - 1.0);
    r.se = std::sqrt(r.var / n);
  }
  return r;
}

}  // namespace

EnsembleResult run_ensemble(const Engine& engine, double x0, const EnsembleOptions& opt) {
  const auto& cfg = engine.config();
  cfg.validate(x0);
  for (double t : opt.t_grid) {
    if (!(t >= 0.0 && t <= cfg.horizon)) {
      fail(ErrorKind::InvalidArgument, "t_grid entries must lie in [0, horizon]");
    }
  }
  if (static_cast<bool>(opt.f) != static_cast<bool>(opt.Lf)) {
    fail(ErrorKind::InvalidArgument, "residual needs both f and Lf");
  }
  const std::size_t n = cfg.n_paths;
  const std::size_t K = opt.t_grid.size();
  std::vector<double> vals(K * n), sq(K * n), sups(K * n), resid(opt.f ? n : 0), mins(n);
  std::vector<std::size_t> clamps(n), caps(n);
  std::vector<unsigned char> capped(n);
  const double f0 = opt.f ? opt.f(x0) : 0.0;

  parallel_for(n, opt.threads, [&](std::size_t p) {
    StatSink sink(opt.t_grid, opt, x0);
    double x[1] = {x0};
    const RunStats rs = engine.run(x, p, sink, opt.patched);
    sink.finish();
    for (std::size_t k = 0; k < K; ++k) {
      const double v = sink.values()[k];
      vals[k * n + p] = v;
      sq[k * n + p] = v * v;
      sups[k * n + p] = sink.sups()[k];
    }
    if (opt.f) resid[p] = opt.f(sink.last()) - f0 - sink.integral();
    mins[p] = sink.min_state();
    clamps[p] = rs.clamp_count;
    caps[p] = rs.cap_doublings + (rs.hit_cap ? 1 : 0);
    capped[p] = rs.hit_cap ? 1 : 0;
  });

  EnsembleResult r;
  r.n_paths = n;
  r.x0 = x0;
  for (std::size_t k = 0; k < K; ++k) {
    TimeStats ts;
    ts.t = opt.t_grid[k];
    const MeanSe a = mean_se(std::span<const double>(vals.data() + k * n, n));
    const MeanSe b = mean_se(std::span<const double>(sq.data() + k * n, n));
    const MeanSe c = mean_se(std::span<const double>(sups.data() + k * n, n));
    ts.mean = a.mean;
    ts.var = a.var;
    ts.se = a.se;
    ts.second = b.mean;
    ts.second_se = b.se;
    ts.sup_second = c.mean;
    ts.sup_second_se = c.se;
    r.stats.push_back(ts);
  }
  if (opt.f) {
    const MeanSe m = mean_se(resid);
    r.has_residual = true;
    r.residual_mean = m.mean;
    r.residual_se = m.se;
  }
  for (std::size_t p = 0; p < n; ++p) {
    r.clamp_count += clamps[p];
    r.cap_events += caps[p];
    r.capped_paths += capped[p];
  }
  r.min_state = *std::min_element(mins.begin(), mins.end());
  return r;
}

namespace {

class CoupledSink : public PathSink {
 public:
  CoupledSink(const CoupledOptions& opt) : opt_(opt), cur_(opt.x0), at_(opt.x0) {}

  void on_grid(double t, std::span<const double> x) override { record(t, x); }
  void on_event(double t, std::span<const double> x) override { record(t, x); }
  void finish() {
    if (!done_) at_ = cur_;
  }

  const std::vector<double>& values() const { return at_; }
  std::size_t violations() const { return violations_; }
  std::size_t checks() const { return checks_; }

 private:
  void record(double t, std::span<const double> x) {
    if (!done_ && t > opt_.t + 1e-12 * std::max(1.0, opt_.t)) {
      at_ = cur_;
      done_ = true;
    }
    cur_.assign(x.begin(), x.end());
    if (opt_.check_order) {
      for (std::size_t l = 0; l + 1 < x.size(); ++l) {
        ++checks_;
        if (x[l] > x[l + 1] + opt_.tol) ++violations_;
      }
    }
  }

  const CoupledOptions& opt_;
  std::vector<double> cur_, at_;
  bool done_ = false;
  std::size_t violations_ = 0, checks_ = 0;
};

}  // namespace

CoupledResult run_coupled_ensemble(const Engine& engine, const CoupledOptions& opt) {
  const auto& cfg = engine.config();
  const std::size_t L = opt.x0.size();
  if (L == 0 || opt.reference >= L) fail(ErrorKind::InvalidArgument, "coupled run needs lanes and a reference lane");
  for (double v : opt.x0) cfg.validate(v);
  if (!(opt.t >= 0.0 && opt.t <= cfg.horizon)) fail(ErrorKind::InvalidArgument, "coupled t must lie in [0, horizon]");
  const std::size_t n = cfg.n_paths;
  std::vector<double> vals(L * n);
  std::vector<std::size_t> viol(n), checks(n), clamps(n);

  parallel_for(n, opt.threads, [&](std::size_t p) {
    CoupledSink sink(opt);
    std::vector<double> x(opt.x0);
    const RunStats rs = engine.run(x, p, sink, false);
    sink.finish();
    for (std::size_t l = 0; l < L; ++l) vals[l * n + p] = sink.values()[l];
    viol[p] = sink.violations();
    checks[p] = sink.checks();
    clamps[p] = rs.clamp_count;
  });

  CoupledResult r;
  r.n_paths = n;
  const std::span<const double> ref(vals.data() + opt.reference * n, n);
  std::vector<double> diff(n);
  for (std::size_t l = 0; l < L; ++l) {
    const std::span<const double> lane(vals.data() + l * n, n);
    const double dn = static_cast<double>(n);
    const double mad = kernels::abs_diff_sum(lane, ref) / dn;
    for (std::size_t p = 0; p < n; ++p) diff[p] = std::fabs(lane[p] - ref[p]);
    const double se = n > 1 ? std::sqrt(kernels::sum_sq_dev(diff, mad) / (dn - 1.0) / dn) : 0.0;
    r.mean_abs_diff.push_back(mad);
    r.se_abs_diff.push_back(se);
    r.mean.push_back(kernels::sum(lane) / dn);
  }
  for (std::size_t p = 0; p < n; ++p) {
    r.violations += viol[p];
    r.checks += checks[p];
    r.paths_with_violation += viol[p] > 0 ? 1 : 0;
    r.clamp_count += clamps[p];
  }
  return r;
}

}  // namespace nnjump
