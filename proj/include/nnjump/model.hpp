#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nnjump/coefficients.hpp"
#include "nnjump/measures.hpp"
#include "nnjump/samplers.hpp"

namespace nnjump {

/// dx = sigma(x) dB + b(x) dt + int_0^{h0(x-,z)} z N0~(ds,dz,du) + int_0^{h1(x-,z)} z N1(ds,dz,du)
struct GeneralJump {
  ScalarFn sigma;
  ScalarFn b;
  RateKernel h0 = RateKernel::constant(0.0);
  RateKernel h1 = RateKernel::constant(0.0);
  std::optional<JumpMeasure> mu0;
  std::optional<JumpMeasure> mu1;
  bool operator==(const GeneralJump&) const = default;
};

/// dx = sqrt(2 a x) dB + (beta x + b) dt + int_0^{x-} z N0~ + int z N1.
struct CBI {
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;
  std::optional<JumpMeasure> nu0;
  std::optional<JumpMeasure> nu1;
  bool operator==(const CBI&) const = default;
};

/// dx = sqrt(2 a x) dB + (c x-)^{1/alpha} dz0 + (beta x + b) dt + int z N1,
/// z0 the centered stable process with Levy measure z^{-1-alpha} dz.
struct StableCBI {
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;
  double c = 0.0;
  double alpha = 1.5;
  std::optional<JumpMeasure> nu1;
  bool operator==(const StableCBI&) const = default;
};

/// dx = sigma dB + phi0(x-) dz0 + b dt + phi1(x-) dz1 - x(t-) dy0 - x(t-) dy1.
/// mu0, nu0 compensated; mu1, nu1 raw; nu0 and nu1 live on (0, 1].
struct LevyDriven {
  ScalarFn sigma;
  ScalarFn b;
  ScalarFn phi0;
  ScalarFn phi1;
  std::optional<JumpMeasure> mu0;
  std::optional<JumpMeasure> mu1;
  std::optional<JumpMeasure> nu0;
  std::optional<JumpMeasure> nu1;
  bool operator==(const LevyDriven&) const = default;
};

/// StableCBI with an emigration term - x(t-) dy1, y1 with Levy measure on (0, 1].
struct CBIE {
  StableCBI base;
  std::optional<JumpMeasure> emigration;
  bool operator==(const CBIE&) const = default;
};

using ModelForm = std::variant<GeneralJump, CBI, StableCBI, LevyDriven, CBIE>;

std::string form_name(const ModelForm& f);

/// How a channel's mark z turns into a state jump.
enum class JumpAction {
  Thinned,       ///< jump z at rate h(x, z) mu(dz)
  Scaled,        ///< jump phi(x) z at rate mu(dz)
  Proportional,  ///< jump -x z at rate mu(dz), z in (0, 1]
};

struct JumpChannel {
  std::string name;
  NoiseId noise = NoiseId::N0;
  JumpAction action = JumpAction::Thinned;
  JumpMeasure measure = JumpMeasure::cpp(1.0, PointMass{1.0});
  RateKernel rate;  // Thinned
  ScalarFn scale;   // Scaled
  bool monotone = false;

  bool compensated() const { return measure.role() == MeasureRole::Compensated; }
  /// State jump for mark z.
  double jump(double x, double z) const;
  /// Intensity multiplier w(x, z) on mu(dz).
  double weight(double x, double z) const;
  /// Factor s(x) with w(x,z) J(x,z) = s(x) z on the support of the rate kernel.
  double factor(double x) const;
  /// Lowest mark with positive weight (the rate kernel threshold).
  double mark_floor() const { return action == JumpAction::Thinned ? rate.z_threshold : 0.0; }
  /// The compensated noise is an exact stable process scaled by a state factor,
  /// so it can be sampled as one increment per step.
  bool exact_stable() const;
  /// Exponent of the exact route: factor^{...} applied to the stable increment.
  double exact_factor(double x) const;
};

/// Coefficients in the common jump-channel form the engine, the conditions
/// and the generator all consume.
struct Dynamics {
  ScalarFn sigma;
  ScalarFn drift;
  std::optional<ScalarFn> drift_b2;
  std::vector<JumpChannel> channels;
  bool levy_form = false;
};

struct ModelSpec {
  std::string name = "model";
  ModelForm form = CBI{};
  /// x -> h0(x, z) and x -> h1(x, z) declared non-decreasing.
  bool h0_monotone = false;
  bool h1_monotone = false;
  /// Declared split b = b1 - b2 with b2 non-decreasing.
  std::optional<ScalarFn> drift_b2;

  /// Validates boundary behaviour and integrability; throws InvalidModel or
  /// Divergent. The conditions module compiles without validation.
  Dynamics compile(bool validate = true) const;
  bool monotone() const { return h0_monotone && h1_monotone; }

  bool operator==(const ModelSpec&) const = default;
};

/// Named parameter sets used by the scenarios and the tests.
namespace presets {
ModelSpec cir(double a = 1.0, double b = 1.0, double beta = -1.0);
ModelSpec cbi(double a = 1.0, double b = 1.0, double beta = -1.0);
ModelSpec stable_cbi(double a = 1.0, double b = 1.0, double beta = -1.0, double c = 1.0,
                     double alpha = 1.5);
ModelSpec levy();
ModelSpec geometric(double sigma = 0.3, double b = 0.1);
ModelSpec cbie();
ModelSpec bounded();
ModelSpec by_name(const std::string& name);
std::vector<std::string> names();
}  // namespace presets

}  // namespace nnjump
