#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nnjump {

/// Real coefficient x -> f(x) on [0, inf). The closed families are the ones a
/// scenario file can describe; Custom exists for programmatic use and tests.
class ScalarFn {
 public:
  struct Const {
    double value = 0.0;
    bool operator==(const Const&) const = default;
  };
  /// slope * x + intercept
  struct Affine {
    double slope = 0.0;
    double intercept = 0.0;
    bool operator==(const Affine&) const = default;
  };
  /// coef * x^exponent, exponent > 0
  struct Power {
    double coef = 1.0;
    double exponent = 1.0;
    bool operator==(const Power&) const = default;
  };
  /// coef * min(x, cap)
  struct CappedLinear {
    double coef = 1.0;
    double cap = 1.0;
    bool operator==(const CappedLinear&) const = default;
  };
  /// coef * x / (1 + x)
  struct Saturating {
    double coef = 1.0;
    bool operator==(const Saturating&) const = default;
  };
  /// Piecewise-linear through (x, y) points, flat outside.
  struct Table {
    std::vector<std::pair<double, double>> points;
    bool operator==(const Table&) const = default;
  };
  struct Custom {
    std::string name;
    std::function<double(double)> fn;
    bool operator==(const Custom& o) const { return name == o.name; }
  };

  using Form = std::variant<Const, Affine, Power, CappedLinear, Saturating, Table, Custom>;

  ScalarFn() : form_(Const{0.0}) {}
  ScalarFn(Form form);  // NOLINT(google-explicit-constructor)

  static ScalarFn zero() { return ScalarFn(Const{0.0}); }
  static ScalarFn constant(double v) { return ScalarFn(Const{v}); }
  static ScalarFn affine(double slope, double intercept) { return ScalarFn(Affine{slope, intercept}); }
  static ScalarFn power(double coef, double exponent) { return ScalarFn(Power{coef, exponent}); }
  static ScalarFn custom(std::string name, std::function<double(double)> fn) {
    return ScalarFn(Custom{std::move(name), std::move(fn)});
  }

  double operator()(double x) const;

  const Form& form() const { return form_; }
  bool is_zero() const;
  std::string describe() const;

  bool operator==(const ScalarFn&) const = default;

 private:
  Form form_;
};

/// State-dependent jump intensity h(x, z) = max(0, g(x)) * 1{z > z_threshold}.
/// The separable shape lets compensator drifts be precomputed per channel.
struct RateKernel {
  ScalarFn x_factor = ScalarFn::constant(1.0);
  double z_threshold = 0.0;

  static RateKernel linear(double coef) { return {ScalarFn::affine(coef, 0.0), 0.0}; }
  static RateKernel constant(double v) { return {ScalarFn::constant(v), 0.0}; }

  double operator()(double x, double z) const {
    if (z <= z_threshold) return 0.0;
    return weight(x);
  }
  /// The x-dependent factor, clipped at zero.
  double weight(double x) const {
    const double g = x_factor(x);
    return g > 0.0 ? g : 0.0;
  }

  bool operator==(const RateKernel&) const = default;
};

}  // namespace nnjump
