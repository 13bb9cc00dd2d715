#include "nnjump/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "nnjump/error.hpp"

namespace nnjump::quad {

bool Tolerance::accepts(const Result& r) const {
  return r.error <= absolute || r.error <= relative * std::fabs(r.value);
}

namespace {

constexpr std::size_t kMaxSegments = 4000;

struct Segment {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Global bisection of the worst segment until the summed error meets tol.
Result global_adaptive(const Integrand& g, double a, double b, Tolerance tol) {
  using boost::math::quadrature::gauss_kronrod;
  auto eval = [&g](double lo, double hi) {
    // boost floors its own estimate at sqrt(eps) |K|; use |K - G| instead.
    Segment s{lo, hi, 0.0, 0.0};
    s.value = gauss_kronrod<double, 31>::integrate(g, lo, hi, 0, 0.0);
    const double gauss15 = boost::math::quadrature::gauss<double, 15>::integrate(g, lo, hi);
    s.error = std::max(std::fabs(s.value - gauss15), 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(s.value));
    return s;
  };
  std::priority_queue<Segment> heap;
  heap.push(eval(a, b));
  Result r{heap.top().value, heap.top().error};
  while (!tol.accepts(r) && std::isfinite(r.value) && heap.size() < kMaxSegments) {
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Segment left = eval(worst.a, mid);
    const Segment right = eval(mid, worst.b);
    heap.push(left);
    heap.push(right);
    r.value += left.value + right.value - worst.value;
    r.error += left.error + right.error - worst.error;
  }
  // Re-sum to shed the drift of the running totals.
  r = {};
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    heap.pop();
  }
  return r;
}

}  // namespace

Result adaptive(const Integrand& f, double a, double b, Tolerance tol) {
  if (a == b) return {};
  const double inf = std::numeric_limits<double>::infinity();
  Result r;
  if (std::isinf(a) && std::isinf(b)) {
    const Result lo = adaptive(f, -inf, 0.0, tol);
    const Result hi = adaptive(f, 0.0, inf, tol);
    return {lo.value + hi.value, lo.error + hi.error};
  }
  if (std::isinf(b)) {
    // x = a + t / (1 - t)
    auto g = [&](double t) {
      const double s = 1.0 - t;
      return f(a + t / s) / (s * s);
    };
    r = global_adaptive(g, 0.0, 1.0, tol);
  } else if (std::isinf(a)) {
    // x = b - (1 - t) / t
    auto g = [&](double t) { return f(b - (1.0 - t) / t) / (t * t); };
    r = global_adaptive(g, 0.0, 1.0, tol);
  } else {
    r = global_adaptive(f, a, b, tol);
  }
  if (!std::isfinite(r.value) || !tol.accepts(r)) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] reached error " << r.error
       << " (value " << r.value << "), tolerance " << tol.absolute;
    fail(ErrorKind::QuadratureFailure, os.str());
  }
  return r;
}

Result log_scale(const Integrand& f, double lo, double hi, Tolerance tol) {
  if (!(hi > lo)) return {};
  const double inf = std::numeric_limits<double>::infinity();
  const double ua = lo > 0.0 ? std::log(lo) : -inf;
  const double ub = std::isinf(hi) ? inf : std::log(hi);
  auto g = [&f](double u) {
    const double z = std::exp(u);
    if (z == 0.0 || std::isinf(z)) return 0.0;
    return f(z) * z;
  };
  // The mapping of doubly infinite ranges converges poorly on power laws, so
  // split at u = 0 (z = 1) which is also the z /\ z^2 seam.
  if (ua < 0.0 && ub > 0.0) {
    const Result left = adaptive(g, ua, 0.0, tol);
    const Result right = adaptive(g, 0.0, ub, tol);
    return {left.value + right.value, left.error + right.error};
  }
  return adaptive(g, ua, ub, tol);
}

double simpson(const double* u, const double* g, std::size_t n) {
  if (n < 2) return 0.0;
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = u[i + 1] - u[i];
    const double h1 = u[i + 2] - u[i + 1];
    const double hs = h0 + h1;
    total += hs / 6.0 *
             ((2.0 - h1 / h0) * g[i] + (hs * hs / (h0 * h1)) * g[i + 1] + (2.0 - h0 / h1) * g[i + 2]);
  }
  if (i + 1 < n) {
    // One leftover panel: parabola through the last three nodes, integrated
    // over the final interval only.
    if (n >= 3) {
      const double h0 = u[n - 2] - u[n - 3];
      const double h1 = u[n - 1] - u[n - 2];
      const double a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
      const double b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
      const double c = (h1 * h1 * h1) / (6.0 * h0 * (h0 + h1));
      total += a * g[n - 1] + b * g[n - 2] - c * g[n - 3];
    } else {
      total += 0.5 * (u[1] - u[0]) * (g[0] + g[1]);
    }
  }
  return total;
}

}  // namespace nnjump::quad
