#include "nnjump/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nnjump/error.hpp"

namespace nnjump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double stable_moment(const StablePowerLaw& s, int k, double lo, double hi) {
  const double p = k - s.alpha;
  if (p == 0.0) {
    if (lo <= 0.0 || std::isinf(hi)) return kInf;
    return s.c * (std::log(hi) - std::log(lo));
  }
  if (p > 0.0) {
    if (std::isinf(hi)) return kInf;
    return s.c * (std::pow(hi, p) - (lo > 0.0 ? std::pow(lo, p) : 0.0)) / p;
  }
  if (lo <= 0.0) return kInf;
  const double top = std::isinf(hi) ? 0.0 : std::pow(hi, p);
  return s.c * (std::pow(lo, p) - top) / (-p);
}

// E[Z^k ; lo < Z <= hi] for the normalized jump law.
double law_moment(const JumpLaw& law, int k, double lo, double hi) {
  return std::visit(
      overloaded{
          [&](const PointMass& p) {
            return (p.at > lo && p.at <= hi) ? std::pow(p.at, k) : 0.0;
          },
          [&](const UniformLaw& u) {
            const double a = std::max(lo, u.lo);
            const double b = std::min(hi, u.hi);
            if (!(b > a)) return 0.0;
            return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (u.hi - u.lo));
          },
          [&](const ExponentialLaw& e) {
            const double m = e.mean;
            auto q = [&](double t) {
              if (std::isinf(t)) return 0.0;
              t = std::max(t, 0.0);
              const double ex = std::exp(-t / m);
              switch (k) {
                case 0: return ex;
                case 1: return (t + m) * ex;
                default: return (t * t + 2.0 * m * t + 2.0 * m * m) * ex;
              }
            };
            if (!(hi > lo)) return 0.0;
            return q(lo) - q(hi);
          },
      },
      law);
}

double law_support_max(const JumpLaw& law) {
  return std::visit(overloaded{
                        [](const PointMass& p) { return p.at; },
                        [](const UniformLaw& u) { return u.hi; },
                        [](const ExponentialLaw&) { return kInf; },
                    },
                    law);
}

double guarded(double v, const char* what, const JumpMeasure& m) {
  if (!std::isfinite(v) || v > kDivergenceThreshold) {
    fail(ErrorKind::Divergent, std::string(what) + " of " + m.describe() + " diverges");
  }
  return v;
}

}  // namespace

std::string to_string(MeasureRole role) {
  return role == MeasureRole::Compensated ? "compensated" : "noncompensated";
}

JumpMeasure::JumpMeasure(Kind kind, MeasureRole role) : kind_(std::move(kind)), role_(role) {
  std::visit(
      overloaded{
          [](const StablePowerLaw& s) {
            if (!(s.c > 0.0) || !std::isfinite(s.c)) {
              fail(ErrorKind::InvalidArgument, "stable measure needs c > 0");
            }
            if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) {
              fail(ErrorKind::InvalidAlpha, "stable measure needs alpha > 0, got " + num(s.alpha));
            }
          },
          [](const CompoundPoisson& p) {
            if (!(p.rate > 0.0) || !std::isfinite(p.rate)) {
              fail(ErrorKind::InvalidArgument, "compound Poisson measure needs rate > 0");
            }
            std::visit(overloaded{
                           [](const PointMass& q) {
                             if (!(q.at > 0.0) || !std::isfinite(q.at)) {
                               fail(ErrorKind::InvalidArgument, "point mass must sit at z > 0");
                             }
                           },
                           [](const ExponentialLaw& e) {
                             if (!(e.mean > 0.0) || !std::isfinite(e.mean)) {
                               fail(ErrorKind::InvalidArgument, "exponential law needs mean > 0");
                             }
                           },
                           [](const UniformLaw& u) {
                             if (!(u.lo >= 0.0) || !(u.hi > u.lo) || !std::isfinite(u.hi)) {
                               fail(ErrorKind::InvalidArgument,
                                    "uniform law needs 0 <= lo < hi < inf");
                             }
                           },
                       },
                       p.law);
          },
          [](const TabulatedDensity& t) {
            if (t.points.size() < 2) {
              fail(ErrorKind::InvalidArgument, "tabulated density needs at least two points");
            }
            for (std::size_t i = 0; i < t.points.size(); ++i) {
              const auto [z, f] = t.points[i];
              if (!(z > 0.0) || !std::isfinite(z)) {
                fail(ErrorKind::InvalidArgument, "tabulated density grid must have z > 0");
              }
              if (!(f >= 0.0) || !std::isfinite(f)) {
                fail(ErrorKind::InvalidArgument, "tabulated density values must be >= 0");
              }
              if (i > 0 && !(z > t.points[i - 1].first)) {
                fail(ErrorKind::InvalidArgument, "tabulated density grid must be strictly increasing");
              }
            }
          },
      },
      kind_);

  if (const auto* t = std::get_if<TabulatedDensity>(&kind_)) {
    const std::size_t n = t->points.size();
    u_.resize(n);
    g_.resize(n);
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      u_[i] = std::log(t->points[i].first);
      g_[i] = t->points[i].second * t->points[i].first;
      if (i > 0) cum_[i] = cum_[i - 1] + 0.5 * (u_[i] - u_[i - 1]) * (g_[i] + g_[i - 1]);
    }
  }
}

double JumpMeasure::support_max() const {
  return std::visit(overloaded{
                        [](const StablePowerLaw&) { return kInf; },
                        [](const CompoundPoisson& p) { return law_support_max(p.law); },
                        [](const TabulatedDensity& t) { return t.points.back().first; },
                    },
                    kind_);
}

double JumpMeasure::table_simpson(int k, double lo, double hi) const {
  return integrate([k](double z) { return std::pow(z, k); }, lo, hi);
}

double JumpMeasure::moment(int k, double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  return std::visit(overloaded{
                        [&](const StablePowerLaw& s) { return stable_moment(s, k, lo, hi); },
                        [&](const CompoundPoisson& p) { return p.rate * law_moment(p.law, k, lo, hi); },
                        [&](const TabulatedDensity&) { return table_simpson(k, lo, hi); },
                    },
                    kind_);
}

double JumpMeasure::integrate(const std::function<double(double)>& F, double lo, double hi,
                              quad::Tolerance tol) const {
  if (!(hi > lo)) return 0.0;
  return std::visit(
      overloaded{
          [&](const StablePowerLaw& s) {
            // In logs: z^{-1-alpha} overflows long before F(z) underflows.
            auto dens = [&](double z) {
              const double fz = F(z);
              if (fz == 0.0) return 0.0;
              const double mag = std::exp(std::log(std::fabs(fz)) + std::log(s.c) - (1.0 + s.alpha) * std::log(z));
              return fz < 0.0 ? -mag : mag;
            };
            return quad::log_scale(dens, lo, hi, tol).value;
          },
          [&](const CompoundPoisson& p) {
            return p.rate *
                   std::visit(overloaded{
                                  [&](const PointMass& q) {
                                    return (q.at > lo && q.at <= hi) ? F(q.at) : 0.0;
                                  },
                                  [&](const UniformLaw& u) {
                                    const double a = std::max(lo, u.lo);
                                    const double b = std::min(hi, u.hi);
                                    if (!(b > a)) return 0.0;
                                    return quad::adaptive(F, a, b, tol).value / (u.hi - u.lo);
                                  },
                                  [&](const ExponentialLaw& e) {
                                    auto dens = [&](double z) {
                                      return F(z) * std::exp(-z / e.mean) / e.mean;
                                    };
                                    return quad::adaptive(dens, std::max(lo, 0.0), hi, tol).value;
                                  },
                              },
                              p.law);
          },
          [&](const TabulatedDensity&) {
            // Restrict the log grid to (lo, hi], inserting interpolated endpoints.
            const double ua = lo > 0.0 ? std::log(lo) : -kInf;
            const double ub = std::isinf(hi) ? kInf : std::log(hi);
            const double a = std::max(ua, u_.front());
            const double b = std::min(ub, u_.back());
            if (!(b > a)) return 0.0;
            const double merge = 1e-9;
            std::vector<double> us, gs;
            auto g_at = [&](double u) {
              auto it = std::upper_bound(u_.begin(), u_.end(), u);
              if (it == u_.end()) return g_.back();
              if (it == u_.begin()) return g_.front();
              const std::size_t j = static_cast<std::size_t>(it - u_.begin());
              const double w = (u - u_[j - 1]) / (u_[j] - u_[j - 1]);
              return g_[j - 1] + w * (g_[j] - g_[j - 1]);
            };
            us.push_back(a);
            gs.push_back(g_at(a));
            for (std::size_t i = 0; i < u_.size(); ++i) {
              if (u_[i] > a + merge && u_[i] < b - merge) {
                us.push_back(u_[i]);
                gs.push_back(g_[i]);
              }
            }
            us.push_back(b);
            gs.push_back(g_at(b));
            for (std::size_t i = 0; i < us.size(); ++i) gs[i] *= F(std::exp(us[i]));
            return quad::simpson(us.data(), gs.data(), us.size());
          },
      },
      kind_);
}

double JumpMeasure::table_cdf_u(double u) const {
  if (u <= u_.front()) return 0.0;
  if (u >= u_.back()) return cum_.back();
  auto it = std::upper_bound(u_.begin(), u_.end(), u);
  const std::size_t j = static_cast<std::size_t>(it - u_.begin()) - 1;
  const double h = u_[j + 1] - u_[j];
  const double s = u - u_[j];
  const double slope = (g_[j + 1] - g_[j]) / h;
  return cum_[j] + g_[j] * s + 0.5 * slope * s * s;
}

double JumpMeasure::sample_above(double eps, double u) const {
  return std::visit(
      overloaded{
          [&](const StablePowerLaw& s) { return eps * std::pow(1.0 - u, -1.0 / s.alpha); },
          [&](const CompoundPoisson& p) {
            return std::visit(overloaded{
                                  [](const PointMass& q) { return q.at; },
                                  [&](const UniformLaw& w) {
                                    const double a = std::max(w.lo, eps);
                                    return a + u * (w.hi - a);
                                  },
                                  [&](const ExponentialLaw& e) {
                                    return std::max(eps, 0.0) - e.mean * std::log1p(-u);
                                  },
                              },
                              p.law);
          },
          [&](const TabulatedDensity&) {
            const double ue = eps > 0.0 ? std::log(eps) : -kInf;
            const double base = table_cdf_u(ue);
            const double target = base + u * (cum_.back() - base);
            auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            std::size_t j = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
            if (j + 1 >= u_.size()) j = u_.size() - 2;
            const double h = u_[j + 1] - u_[j];
            const double slope = (g_[j + 1] - g_[j]) / h;
            const double r = target - cum_[j];
            const double disc = std::max(0.0, g_[j] * g_[j] + 2.0 * slope * r);
            const double den = g_[j] + std::sqrt(disc);
            double s = den > 0.0 ? 2.0 * r / den : 0.0;
            s = std::clamp(s, 0.0, h);
            return std::max(std::exp(u_[j] + s), eps);
          },
      },
      kind_);
}

std::string JumpMeasure::describe() const {
  const std::string base = std::visit(
      overloaded{
          [](const StablePowerLaw& s) { return "stable(c=" + num(s.c) + ", alpha=" + num(s.alpha) + ")"; },
          [](const CompoundPoisson& p) {
            const std::string law = std::visit(
                overloaded{
                    [](const PointMass& q) { return "point(" + num(q.at) + ")"; },
                    [](const ExponentialLaw& e) { return "exponential(" + num(e.mean) + ")"; },
                    [](const UniformLaw& u) { return "uniform(" + num(u.lo) + ", " + num(u.hi) + ")"; },
                },
                p.law);
            return "cpp(rate=" + num(p.rate) + ", " + law + ")";
          },
          [](const TabulatedDensity& t) { return "table[" + std::to_string(t.points.size()) + "]"; },
      },
      kind_);
  return base + " " + to_string(role_);
}

double check_integrability(const JumpMeasure& m) {
  double v = 0.0;
  if (m.role() == MeasureRole::Compensated) {
    if (const auto* s = std::get_if<StablePowerLaw>(&m.kind()); s && !(s->alpha > 1.0 && s->alpha < 2.0)) {
      fail(ErrorKind::Divergent, "integrability of " + m.describe() +
                                     ": int (z /\\ z^2) m(dz) is infinite unless 1 < alpha < 2");
    }
    v = m.moment(2, 0.0, 1.0) + m.moment(1, 1.0, kInf);
    return guarded(v, "int (z /\\ z^2) m(dz)", m);
  }
  if (const auto* s = std::get_if<StablePowerLaw>(&m.kind()); s && !(s->alpha > 0.0 && s->alpha < 1.0)) {
    fail(ErrorKind::Divergent, "integrability of " + m.describe() +
                                   ": int (1 /\\ z) m(dz) is infinite unless 0 < alpha < 1");
  }
  v = m.moment(1, 0.0, 1.0) + m.moment(0, 1.0, kInf);
  return guarded(v, "int (1 /\\ z) m(dz)", m);
}

double tail_mass(const JumpMeasure& m, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "tail mass needs eps > 0");
  return guarded(m.moment(0, eps, kInf), "tail mass", m);
}

double compensator_drift(const JumpMeasure& m, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "compensator drift needs eps > 0");
  return guarded(m.moment(1, eps, kInf), "int_{(eps,inf)} z m(dz)", m);
}

double small_jump_variance(const JumpMeasure& m, double eps) {
  if (!(eps > 0.0)) return 0.0;
  return guarded(m.moment(2, 0.0, eps), "int_{(0,eps]} z^2 m(dz)", m);
}

double small_jump_mean(const JumpMeasure& m, double eps) {
  if (!(eps > 0.0)) return 0.0;
  return guarded(m.moment(1, 0.0, eps), "int_{(0,eps]} z m(dz)", m);
}

}  // namespace nnjump
