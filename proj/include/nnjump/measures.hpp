#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nnjump/quadrature.hpp"

namespace nnjump {

/// How a measure enters the equation: through the compensated random measure
/// (needs finite integral of z /\ z^2) or the raw one (needs 1 /\ z).
enum class MeasureRole { Compensated, NonCompensated };

std::string to_string(MeasureRole role);

struct PointMass {
  double at = 1.0;
  bool operator==(const PointMass&) const = default;
};
struct ExponentialLaw {
  double mean = 1.0;
  bool operator==(const ExponentialLaw&) const = default;
};
struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const UniformLaw&) const = default;
};
using JumpLaw = std::variant<PointMass, ExponentialLaw, UniformLaw>;

/// c z^{-1-alpha} dz on (0, inf).
struct StablePowerLaw {
  double c = 1.0;
  double alpha = 1.5;
  bool operator==(const StablePowerLaw&) const = default;
};
/// rate * law(dz).
struct CompoundPoisson {
  double rate = 1.0;
  JumpLaw law = PointMass{};
  bool operator==(const CompoundPoisson&) const = default;
};
/// Density f(z) given at strictly increasing z > 0, zero outside the grid.
struct TabulatedDensity {
  std::vector<std::pair<double, double>> points;
  bool operator==(const TabulatedDensity&) const = default;
};

/// Partial sums above this are reported as divergent.
inline constexpr double kDivergenceThreshold = 1e12;

class JumpMeasure {
 public:
  using Kind = std::variant<StablePowerLaw, CompoundPoisson, TabulatedDensity>;

  JumpMeasure(Kind kind, MeasureRole role);

  static JumpMeasure stable(double c, double alpha, MeasureRole role = MeasureRole::Compensated) {
    return JumpMeasure(StablePowerLaw{c, alpha}, role);
  }
  static JumpMeasure cpp(double rate, JumpLaw law, MeasureRole role = MeasureRole::NonCompensated) {
    return JumpMeasure(CompoundPoisson{rate, law}, role);
  }
  static JumpMeasure table(std::vector<std::pair<double, double>> points,
                           MeasureRole role = MeasureRole::Compensated) {
    return JumpMeasure(TabulatedDensity{std::move(points)}, role);
  }

  const Kind& kind() const { return kind_; }
  MeasureRole role() const { return role_; }
  bool is_stable() const { return std::holds_alternative<StablePowerLaw>(kind_); }
  /// Total mass is finite (compound Poisson or table).
  bool is_finite() const { return !is_stable(); }
  /// Supremum of the support; inf for unbounded laws.
  double support_max() const;

  /// int_{(lo, hi]} z^k m(dz) for k in {0, 1, 2}; closed form where one exists.
  /// Returns +inf when the integral diverges.
  double moment(int k, double lo, double hi) const;

  /// int_{(lo, hi]} F(z) m(dz). Power laws go through log-scale adaptive
  /// quadrature, tables through Simpson on the log grid.
  double integrate(const std::function<double(double)>& F, double lo, double hi,
                   quad::Tolerance tol = {}) const;

  /// Mark with law m restricted to (eps, inf), normalized, by inverse CDF of
  /// the uniform u in [0, 1).
  double sample_above(double eps, double u) const;

  std::string describe() const;

  bool operator==(const JumpMeasure& o) const { return kind_ == o.kind_ && role_ == o.role_; }

 private:
  Kind kind_;
  MeasureRole role_;
  // Table caches in u = ln z: g = f(z) z, cum = trapezoid mass of the
  // piecewise-linear g used for sampling.
  std::vector<double> u_, g_, cum_;

  double table_simpson(int k, double lo, double hi) const;
  double table_cdf_u(double u) const;
};

/// Role-appropriate integral: int (z /\ z^2) dm or int (1 /\ z) dm.
/// Throws Error(Divergent).
double check_integrability(const JumpMeasure& m);
/// m((eps, inf)).
double tail_mass(const JumpMeasure& m, double eps);
/// int_{(eps, inf)} z dm.
double compensator_drift(const JumpMeasure& m, double eps);
/// int_{(0, eps]} z^2 dm.
double small_jump_variance(const JumpMeasure& m, double eps);
/// int_{(0, eps]} z dm, the mean of dropped raw small jumps.
double small_jump_mean(const JumpMeasure& m, double eps);

}  // namespace nnjump
