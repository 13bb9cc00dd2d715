#include "nnjump/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnjump/error.hpp"
#include "nnjump/quadrature.hpp"

namespace nnjump {

namespace {

constexpr double kRise = 0.25;
constexpr quad::Tolerance kTight{0.0, 1e-11};
constexpr std::size_t kNodes = 128;

double smoothstep(double q) { return q <= 0.5 ? 2.0 * q * q : 1.0 - 2.0 * (1.0 - q) * (1.0 - q); }

double smoothstep_integral(double q) {
  return q <= 0.5 ? (2.0 / 3.0) * q * q * q : (q - 0.5) + (2.0 / 3.0) * std::pow(1.0 - q, 3);
}

}  // namespace

double PowerModulus::operator()(double z) const { return C * std::pow(std::fabs(z), gamma); }

double PowerModulus::osgood_integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double c2 = C * C;
  if (gamma == 0.5) return (a > 0.0 ? std::log(b / a) : std::numeric_limits<double>::infinity()) / c2;
  const double p = 1.0 - 2.0 * gamma;
  if (p < 0.0 && a == 0.0) return std::numeric_limits<double>::infinity();
  return (std::pow(b, p) - std::pow(a, p)) / (p * c2);
}

double bump(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  if (s < kRise) return kBumpHeight * smoothstep(s / kRise);
  if (s > 1.0 - kRise) return kBumpHeight * smoothstep((1.0 - s) / kRise);
  return kBumpHeight;
}

double bump_integral(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (s > 0.5) return 1.0 - bump_integral(1.0 - s);
  if (s <= kRise) return kBumpHeight * kRise * smoothstep_integral(s / kRise);
  return kBumpHeight * kRise / 2.0 + kBumpHeight * (s - kRise);
}

Gadget::Gadget(PowerModulus rho, int k_max, GadgetVariant variant)
    : rho_(rho), k_max_(k_max), variant_(variant) {
  if (!(rho.C > 0.0) || !std::isfinite(rho.C)) fail(ErrorKind::InvalidArgument, "gadget.C must be > 0");
  if (k_max < 1) fail(ErrorKind::InvalidArgument, "gadget.k_max must be >= 1");
  if (!(rho.gamma >= 0.5)) {
    fail(ErrorKind::NonOsgood, "gadget: int_0+ rho^-2 converges for rho = C z^gamma with gamma < 1/2");
  }
  const double c2 = rho.C * rho.C;
  a_.push_back(1.0);
  double log_a = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    if (rho.gamma == 0.5) {
      log_a -= k * c2;
      a_.push_back(std::exp(log_a));
    } else {
      const double p = 1.0 - 2.0 * rho.gamma;
      a_.push_back(std::pow(std::pow(a_.back(), p) + k * c2 * (2.0 * rho.gamma - 1.0), 1.0 / p));
    }
    if (!(a_.back() > 0.0)) fail(ErrorKind::NonOsgood, "gadget: partition underflows at k = " + std::to_string(k));
  }
  nodes_.resize(static_cast<std::size_t>(k_max) + 1);
  cum_.resize(static_cast<std::size_t>(k_max) + 1);
  for (int k = 1; k <= k_max; ++k) {
    auto& nd = nodes_[k];
    auto& cm = cum_[k];
    const double lo = a_[k], hi = a_[k - 1];
    for (std::size_t i = 0; i <= kNodes; ++i) {
      nd.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / kNodes));
    }
    nd.back() = hi;
    cm.push_back(0.0);
    for (std::size_t i = 1; i <= kNodes; ++i) {
      const double piece = quad::log_scale([&](double z) { return dPhi(k, z); }, nd[i - 1], nd[i], kTight).value;
      cm.push_back(cm.back() + piece);
    }
  }
}

void Gadget::check_k(int k) const {
  if (k < 1 || k > k_max_) fail(ErrorKind::InvalidArgument, "gadget: k out of range");
}

double Gadget::osgood_time(int k, double z) const {
  check_k(k);
  if (z <= a_[k]) return 0.0;
  if (z >= a_[k - 1]) return 1.0;
  return std::clamp(rho_.osgood_integral(a_[k], z) / k, 0.0, 1.0);
}

double Gadget::psi(int k, double z) const {
  check_k(k);
  if (z <= a_[k] || z >= a_[k - 1]) return 0.0;
  const double r = rho_(z);
  return bump(osgood_time(k, z)) / (k * r * r);
}

double Gadget::dPhi(int k, double z) const {
  if (z <= a_[k]) return 0.0;
  if (z >= a_[k - 1]) return 1.0;
  return bump_integral(osgood_time(k, z));
}

double Gadget::Phi(int k, double z) const {
  if (z <= a_[k]) return 0.0;
  const auto& nd = nodes_[k];
  const auto& cm = cum_[k];
  if (z >= a_[k - 1]) return cm.back() + (z - a_[k - 1]);
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(nd.begin(), nd.end(), z) - nd.begin()) - 1;
  return cm[i] + quad::log_scale([&](double u) { return dPhi(k, u); }, nd[i], z, kTight).value;
}

double Gadget::phi(int k, double x) const {
  check_k(k);
  if (variant_ == GadgetVariant::OneSided) return x > 0.0 ? Phi(k, x) : 0.0;
  return Phi(k, std::fabs(x));
}

double Gadget::dphi(int k, double x) const {
  check_k(k);
  if (variant_ == GadgetVariant::OneSided) return x > 0.0 ? dPhi(k, x) : 0.0;
  return x < 0.0 ? -dPhi(k, -x) : dPhi(k, x);
}

double Gadget::d2phi(int k, double x) const {
  check_k(k);
  if (variant_ == GadgetVariant::OneSided) return x > 0.0 ? psi(k, x) : 0.0;
  return psi(k, std::fabs(x));
}

double Gadget::partition_integral(int k) const {
  check_k(k);
  return quad::log_scale([&](double z) { const double r = rho_(z); return 1.0 / (r * r); }, a_[k], a_[k - 1], kTight)
      .value;
}

double Gadget::psi_mass(int k) const {
  check_k(k);
  return quad::log_scale([&](double z) { return psi(k, z); }, a_[k], a_[k - 1], kTight).value;
}

double gadget_Delta(const Gadget& g, int k, double zeta, double h) { return g.phi(k, zeta + h) - g.phi(k, zeta); }

double gadget_D(const Gadget& g, int k, double zeta, double h) {
  return gadget_Delta(g, k, zeta, h) - h * g.dphi(k, zeta);
}

DiagnosticsReport gadget_bounds_check(const Gadget& g, int k, std::span<const std::pair<double, double>> samples,
                                      double tol) {
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::GadgetBounds;
  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [zeta, h] : samples) {
    if (zeta * h < 0.0) fail(ErrorKind::InvalidArgument, "gadget samples need zeta h >= 0");
    const double D = gadget_D(g, k, zeta, h);
    const double Delta = gadget_Delta(g, k, zeta, h);
    const double r = g.rho()(zeta);
    const double env = r > 0.0 ? h * h / (k * r * r) : std::numeric_limits<double>::infinity();
    const double e = std::max({D - env, D - Delta, Delta - std::fabs(h)});
    worst = std::max(worst, e);
    if (e > tol) {
      ++violations;
      if (rep.rows.size() < 16) rep.rows.push_back({zeta, h, D, Delta, env});
    }
  }
  rep.statistic = samples.empty() ? 0.0 : worst;
  rep.band_hi = tol;
  rep.band_lo = -std::numeric_limits<double>::infinity();
  rep.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  rep.metadata["k"] = std::to_string(k);
  rep.metadata["samples"] = std::to_string(samples.size());
  rep.metadata["violations"] = std::to_string(violations);
  return rep;
}

double gadget_envelope_excess(const Gadget& g, int k, std::size_t points) {
  const double lo = g.a(k), hi = g.a(k - 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= points; ++i) {
    const double z = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points + 1));
    const double r = g.rho()(z);
    worst = std::max(worst, g.psi(k, z) * r * r - 2.0 / k);
  }
  return worst;
}

}  // namespace nnjump
