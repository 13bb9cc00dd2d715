#pragma once

#include <functional>

namespace nnjump::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

struct Tolerance {
  double absolute = 1e-10;
  double relative = 1e-10;
  bool accepts(const Result& r) const;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b]; either bound may be infinite.
/// Throws Error(QuadratureFailure) when the error estimate misses `tol`.
Result adaptive(const Integrand& f, double a, double b, Tolerance tol = {});

/// Integral of f over (lo, hi] computed in u = ln z, which resolves power-law
/// behaviour at both ends. lo = 0 and hi = inf are allowed.
Result log_scale(const Integrand& f, double lo, double hi, Tolerance tol = {});

/// Composite Simpson on arbitrary (possibly uneven) nodes u[i] with values
/// g[i]; uneven pairs use the three-point parabola through each panel.
double simpson(const double* u, const double* g, std::size_t n);

}  // namespace nnjump::quad
