#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nnjump/analysis.hpp"

namespace nnjump {

/// rho(z) = C z^gamma.
struct PowerModulus {
  double C = 1.0;
  double gamma = 0.5;
  double operator()(double z) const;
  /// int_a^b rho(z)^{-2} dz in closed form.
  double osgood_integral(double a, double b) const;
};

enum class GadgetVariant { Symmetric, OneSided };

/// Plateau bump on [0, 1] with unit mass: quadratic rise on [0, 0.25],
/// height 4/3, symmetric fall.
double bump(double s);
/// int_0^s bump.
double bump_integral(double s);
inline constexpr double kBumpHeight = 4.0 / 3.0;

/// Smooth approximations phi_k of |x| (or x+) whose second derivative
/// psi_k lives on (a_k, a_{k-1}) with psi_k rho^2 <= 2/k.
class Gadget {
 public:
  /// Throws NonOsgood unless int_{0+} rho^{-2} diverges (gamma >= 1/2).
  Gadget(PowerModulus rho, int k_max, GadgetVariant variant = GadgetVariant::Symmetric);

  const PowerModulus& rho() const { return rho_; }
  int k_max() const { return k_max_; }
  GadgetVariant variant() const { return variant_; }
  /// a_0 = 1 > a_1 > ... > a_{k_max}.
  double a(int k) const { return a_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& partition() const { return a_; }

  /// Normalized Osgood time of z in (a_k, a_{k-1}), in [0, 1].
  double osgood_time(int k, double z) const;

  double psi(int k, double z) const;
  double phi(int k, double x) const;
  double dphi(int k, double x) const;
  double d2phi(int k, double x) const;

  /// int_{a_k}^{a_{k-1}} rho^{-2} by quadrature.
  double partition_integral(int k) const;
  /// int psi_k by quadrature.
  double psi_mass(int k) const;

 private:
  PowerModulus rho_;
  int k_max_;
  GadgetVariant variant_;
  std::vector<double> a_;
  // Cumulative Phi_k at geometric nodes on [a_k, a_{k-1}].
  std::vector<std::vector<double>> nodes_, cum_;

  void check_k(int k) const;
  double Phi(int k, double z) const;
  double dPhi(int k, double z) const;
};

/// Second-order difference D_h phi_k(zeta) = phi(zeta + h) - phi(zeta) - h phi'(zeta).
double gadget_D(const Gadget& g, int k, double zeta, double h);
double gadget_Delta(const Gadget& g, int k, double zeta, double h);

/// For samples (zeta, h) with zeta h >= 0: D <= h^2 / (k rho(|zeta|)^2) and
/// D <= Delta <= |h|, each within tol.
DiagnosticsReport gadget_bounds_check(const Gadget& g, int k, std::span<const std::pair<double, double>> samples,
                                      double tol = 1e-9);

/// max over the points of psi_k(z) rho(z)^2 - 2/k on (a_k, a_{k-1}); <= 0 is required.
double gadget_envelope_excess(const Gadget& g, int k, std::size_t points = 1000);

}  // namespace nnjump
