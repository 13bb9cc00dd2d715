#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnjump/model.hpp"

namespace nnjump {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

struct ModulusFit {
  std::string family = "power";
  double gamma = 0.0;
  double coef = 0.0;
  double r_squared = 0.0;
  /// (d, M(d)) per occupied geometric bin.
  std::vector<std::pair<double, double>> table;
};

struct Witness {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double value = 0.0;
};

struct ConditionReport {
  std::string condition_id;
  Verdict verdict = Verdict::Inconclusive;
  std::map<std::string, double> constants;
  /// Tabulated function of x (L(x), its envelope, or growth ratios).
  std::vector<std::pair<double, double>> table;
  std::vector<std::pair<double, double>> envelope;
  std::optional<ModulusFit> modulus_fit;
  std::vector<Witness> witnesses;
  std::string note;
};

/// 0 followed by n log-spaced states in [1e-8, m].
std::vector<double> default_state_grid(double m, std::size_t n = 200);
/// About n pairs in [0, m]^2: log-spaced gaps from 1e-8 anchored at 0 and at
/// several base points, plus random pairs.
std::vector<std::pair<double, double>> default_pair_grid(double m, std::size_t n = 10000,
                                                         std::uint64_t seed = 20240601);

/// K = max_x [|b(x)| + sum over raw upward channels of int sup_{y<=x} w J mu] / (1 + x).
ConditionReport check_linear_growth(const ModelSpec& model, std::span<const double> grid);
/// The bracket above divided by (1 + x) at one state; sup over y <= x is taken on a fine grid.
double linear_growth_ratio(const Dynamics& d, double x);

/// L(x) = sigma(x)^2 + sum over compensated channels of int w (|J| /\ J^2) mu.
ConditionReport check_local_bound(const ModelSpec& model, std::span<const double> grid);
double local_bound(const Dynamics& d, double x);

/// Non-decreasing rates in x for every compensated channel, per mark in z_grid.
ConditionReport check_monotone(const ModelSpec& model, std::span<const double> grid,
                               std::span<const double> z_grid);

enum class ModulusTarget { OsgoodR, SquareRho, Lipschitz };

std::string to_string(ModulusTarget t);

/// Left-hand side of the modulus inequality for the target at (x, y).
double modulus_lhs(const Dynamics& d, ModulusTarget target, double x, double y);

/// M(d) = max over pairs with |x-y| in [d, 2d) of lhs(x, y), fitted as C d^gamma
/// by least squares in log-log scale.
ModulusFit fit_power_law(const std::function<double(double, double)>& lhs,
                         std::span<const std::pair<double, double>> pairs);

/// Minimum exponent accepted as gamma >= 1.
inline constexpr double kGammaTolerance = 0.02;
inline constexpr double kMinRSquared = 0.99;

ConditionReport fit_modulus(const ModelSpec& model, std::span<const std::pair<double, double>> pairs,
                            ModulusTarget target);

/// K = sup[b^2 + sigma^2] + int sup w J^2 mu0 + int sup w (|J| v J^2) mu1, the
/// constant of the second-moment bound.
ConditionReport check_second_moment(const ModelSpec& model);

/// sup over x >= 0 of |f(x)|; closed form for the scalar families.
double sup_abs(const ScalarFn& f);

}  // namespace nnjump
