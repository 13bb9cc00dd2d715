#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <vector>
#include <limits>

#include "nnjump/analysis.hpp"
#include "nnjump/error.hpp"

namespace nnjump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TestFunction::Certificate TestFunction::certify(double range) const {
  if (!(range >= 0.0) || !std::isfinite(range)) fail(ErrorKind::InvalidArgument, "certificate range must be finite");
  Certificate c;
  c.range = range;
  constexpr int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double x = range * i / n;
    const double a = f(x), b = df(x), d = d2f(x);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(d)) {
      fail(ErrorKind::InvalidArgument, "test function " + name + " is not finite at x = " + std::to_string(x));
    }
    c.sup_f = std::max(c.sup_f, std::fabs(a));
    c.sup_df = std::max(c.sup_df, std::fabs(b));
    c.sup_d2f = std::max(c.sup_d2f, std::fabs(d));
  }
  return c;
}

TestFunction TestFunction::identity() {
  return {"x", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

TestFunction TestFunction::square() {
  return {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }, [](double) { return 2.0; }};
}

TestFunction TestFunction::exp_neg() {
  return {"exp(-x)", [](double x) { return std::exp(-x); }, [](double x) { return -std::exp(-x); },
          [](double x) { return std::exp(-x); }};
}

TestFunction TestFunction::constant(double c) {
  return {"const", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

TestFunction TestFunction::combine(double a, const TestFunction& f, const TestFunction& g) {
  return {std::to_string(a) + "*" + f.name + "+" + g.name,
          [=](double x) { return a * f.f(x) + g.f(x); },
          [=](double x) { return a * f.df(x) + g.df(x); },
          [=](double x) { return a * f.d2f(x) + g.d2f(x); }};
}

double apply_generator(const Dynamics& d, const TestFunction& tf, double x) {
  const double fx = tf.f(x);
  const double d1 = tf.df(x);
  const double d2 = tf.d2f(x);
  const double s = d.sigma(x);
  double out = 0.5 * s * s * d2 + d.drift(x) * d1;
  for (const auto& ch : d.channels) {
    const bool comp = ch.compensated();
    double w = 1.0;
    if (ch.action == JumpAction::Thinned) {
      w = ch.rate.weight(x);
      if (w == 0.0) continue;
    }
    auto J = [&](double z) { return ch.jump(x, z); };
    auto F = [&](double z) {
      const double j = J(z);
      if (std::fabs(j) < kTaylorCutoff) return comp ? 0.5 * d2 * j * j : d1 * j + 0.5 * d2 * j * j;
      return comp ? tf.f(x + j) - fx - j * d1 : tf.f(x + j) - fx;
    };
    // J is linear in z; split where F switches to the Taylor term and at z = 1.
    const double lo = ch.mark_floor();
    const double j1 = std::fabs(J(1.0));
    std::vector<double> cuts{lo};
    if (j1 > 0.0 && kTaylorCutoff / j1 > lo && kTaylorCutoff / j1 < 1.0) cuts.push_back(kTaylorCutoff / j1);
    if (lo < 1.0) cuts.push_back(1.0);
    cuts.push_back(kInf);
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      v += ch.measure.integrate(F, cuts[i], cuts[i + 1], kGeneratorTolerance);
    }
    out += w * v;
  }
  return out;
}

double apply_generator(const ModelSpec& model, const TestFunction& f, double x) {
  return apply_generator(model.compile(), f, x);
}

struct GeneratorTable::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

GeneratorTable::GeneratorTable(const Dynamics& d, const TestFunction& f, double range, std::size_t nodes)
    : dyn_(d), f_(f), range_(range) {
  if (!(range > 0.0) || nodes < 5) fail(ErrorKind::InvalidArgument, "generator table needs range > 0 and >= 5 nodes");
  std::vector<double> v(nodes);
  const double h = range / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) v[i] = apply_generator(dyn_, f_, h * static_cast<double>(i));
  spline_ = std::make_shared<const Spline>(
      Spline{boost::math::interpolators::cardinal_cubic_b_spline<double>(v.begin(), v.end(), 0.0, h)});
}

double GeneratorTable::operator()(double x) const {
  if (x >= 0.0 && x <= range_) return spline_->s(x);
  return apply_generator(dyn_, f_, x);
}

}  // namespace nnjump
