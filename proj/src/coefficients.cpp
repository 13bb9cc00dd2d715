#include "nnjump/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nnjump/error.hpp"

namespace nnjump {

namespace {

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

}  // namespace

ScalarFn::ScalarFn(Form form) : form_(std::move(form)) {
  if (const auto* t = std::get_if<Table>(&form_)) {
    if (t->points.empty()) fail(ErrorKind::InvalidArgument, "coefficient table has no points");
    for (std::size_t i = 1; i < t->points.size(); ++i) {
      if (!(t->points[i].first > t->points[i - 1].first)) {
        fail(ErrorKind::InvalidArgument, "coefficient table x values must be strictly increasing");
      }
    }
  }
  if (const auto* p = std::get_if<Power>(&form_); p && !(p->exponent > 0.0)) {
    fail(ErrorKind::InvalidArgument, "power coefficient needs a positive exponent");
  }
  if (const auto* c = std::get_if<Custom>(&form_); c && !c->fn) {
    fail(ErrorKind::InvalidArgument, "custom coefficient '" + c->name + "' has no function");
  }
}

double ScalarFn::operator()(double x) const {
  return std::visit(
      overloaded{
          [](const Const& c) { return c.value; },
          [x](const Affine& a) { return a.slope * x + a.intercept; },
          [x](const Power& p) {
            if (x <= 0.0) return 0.0;
            if (p.exponent == 0.5) return p.coef * std::sqrt(x);
            if (p.exponent == 1.0) return p.coef * x;
            return p.coef * std::pow(x, p.exponent);
          },
          [x](const CappedLinear& c) { return c.coef * std::min(x, c.cap); },
          [x](const Saturating& s) { return s.coef * x / (1.0 + x); },
          [x](const Table& t) {
            const auto& pts = t.points;
            if (x <= pts.front().first) return pts.front().second;
            if (x >= pts.back().first) return pts.back().second;
            auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                       [](double v, const auto& p) { return v < p.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (x - lo.first) / (hi.first - lo.first);
            return lo.second + w * (hi.second - lo.second);
          },
          [x](const Custom& c) { return c.fn(x); },
      },
      form_);
}

bool ScalarFn::is_zero() const {
  return std::visit(overloaded{
                        [](const Const& c) { return c.value == 0.0; },
                        [](const Affine& a) { return a.slope == 0.0 && a.intercept == 0.0; },
                        [](const Power& p) { return p.coef == 0.0; },
                        [](const CappedLinear& c) { return c.coef == 0.0; },
                        [](const Saturating& s) { return s.coef == 0.0; },
                        [](const Table& t) {
                          return std::all_of(t.points.begin(), t.points.end(),
                                             [](const auto& p) { return p.second == 0.0; });
                        },
                        [](const Custom&) { return false; },
                    },
                    form_);
}

std::string ScalarFn::describe() const {
  return std::visit(
      overloaded{
          [](const Const& c) { return num(c.value); },
          [](const Affine& a) { return num(a.slope) + "*x+" + num(a.intercept); },
          [](const Power& p) { return num(p.coef) + "*x^" + num(p.exponent); },
          [](const CappedLinear& c) { return num(c.coef) + "*min(x," + num(c.cap) + ")"; },
          [](const Saturating& s) { return num(s.coef) + "*x/(1+x)"; },
          [](const Table& t) { return "table[" + std::to_string(t.points.size()) + "]"; },
          [](const Custom& c) { return "custom:" + c.name; },
      },
      form_);
}

}  // namespace nnjump
