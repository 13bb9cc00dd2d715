#include "nnjump/model.hpp"

#include <cmath>

#include "nnjump/error.hpp"

namespace nnjump {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

JumpMeasure with_role(const JumpMeasure& m, MeasureRole role) { return JumpMeasure(m.kind(), role); }

JumpChannel thinned(std::string name, NoiseId noise, const JumpMeasure& m, RateKernel rate,
                    bool monotone) {
  JumpChannel c;
  c.name = std::move(name);
  c.noise = noise;
  c.action = JumpAction::Thinned;
  c.measure = with_role(m, noise == NoiseId::N0 ? MeasureRole::Compensated : MeasureRole::NonCompensated);
  c.rate = std::move(rate);
  c.monotone = monotone;
  return c;
}

JumpChannel scaled(std::string name, NoiseId noise, const JumpMeasure& m, ScalarFn phi, bool monotone) {
  JumpChannel c;
  c.name = std::move(name);
  c.noise = noise;
  c.action = JumpAction::Scaled;
  c.measure = with_role(m, noise == NoiseId::N0 ? MeasureRole::Compensated : MeasureRole::NonCompensated);
  c.scale = std::move(phi);
  c.monotone = monotone;
  return c;
}

JumpChannel proportional(std::string name, NoiseId noise, const JumpMeasure& m) {
  JumpChannel c;
  c.name = std::move(name);
  c.noise = noise;
  c.action = JumpAction::Proportional;
  c.measure = with_role(m, noise == NoiseId::N0 ? MeasureRole::Compensated : MeasureRole::NonCompensated);
  c.monotone = true;
  return c;
}

ScalarFn sqrt_2a(double a) { return a == 0.0 ? ScalarFn::zero() : ScalarFn::power(std::sqrt(2.0 * a), 0.5); }

void add_stable_cbi(Dynamics& d, const StableCBI& s, const ModelSpec& spec) {
  if (s.a < 0.0 || s.b < 0.0 || s.c < 0.0) {
    fail(ErrorKind::InvalidModel, "model." + std::string(s.a < 0.0 ? "a" : s.b < 0.0 ? "b" : "c") +
                                      " must be >= 0");
  }
  d.sigma = sqrt_2a(s.a);
  d.drift = ScalarFn::affine(s.beta, s.b);
  if (s.c > 0.0) {
    d.channels.push_back(thinned("N0", NoiseId::N0, JumpMeasure::stable(s.c, s.alpha),
                                 RateKernel::linear(1.0), spec.h0_monotone));
  }
  if (s.nu1) {
    d.channels.push_back(thinned("N1", NoiseId::N1, *s.nu1, RateKernel::constant(1.0), spec.h1_monotone));
  }
}

}  // namespace

std::string form_name(const ModelForm& f) {
  return std::visit(overloaded{
                        [](const GeneralJump&) { return "general"; },
                        [](const CBI&) { return "cbi"; },
                        [](const StableCBI&) { return "stable_cbi"; },
                        [](const LevyDriven&) { return "levy"; },
                        [](const CBIE&) { return "cbie"; },
                    },
                    f);
}

double JumpChannel::jump(double x, double z) const {
  switch (action) {
    case JumpAction::Thinned: return z;
    case JumpAction::Scaled: return scale(x) * z;
    case JumpAction::Proportional: return -x * z;
  }
  return 0.0;
}

double JumpChannel::weight(double x, double z) const {
  return action == JumpAction::Thinned ? rate(x, z) : 1.0;
}

double JumpChannel::factor(double x) const {
  switch (action) {
    case JumpAction::Thinned: return rate.weight(x);
    case JumpAction::Scaled: return scale(x);
    case JumpAction::Proportional: return -x;
  }
  return 0.0;
}

bool JumpChannel::exact_stable() const {
  if (!compensated()) return false;
  const auto* s = std::get_if<StablePowerLaw>(&measure.kind());
  if (!s || !(s->alpha > 1.0 && s->alpha < 2.0)) return false;
  if (action == JumpAction::Scaled) return true;
  return action == JumpAction::Thinned && rate.z_threshold == 0.0;
}

double JumpChannel::exact_factor(double x) const {
  if (action == JumpAction::Scaled) return scale(x);
  // Thinning at rate g(x) of c z^{-1-alpha} dz has the law of g(x)^{1/alpha} times the unthinned noise.
  const double g = rate.weight(x);
  const double alpha = std::get<StablePowerLaw>(measure.kind()).alpha;
  return g > 0.0 ? std::pow(g, 1.0 / alpha) : 0.0;
}

Dynamics ModelSpec::compile(bool validate) const {
  Dynamics d;
  d.drift_b2 = drift_b2;
  std::visit(
      overloaded{
          [&](const GeneralJump& g) {
            d.sigma = g.sigma;
            d.drift = g.b;
            if (g.mu0) d.channels.push_back(thinned("N0", NoiseId::N0, *g.mu0, g.h0, h0_monotone));
            if (g.mu1) d.channels.push_back(thinned("N1", NoiseId::N1, *g.mu1, g.h1, h1_monotone));
          },
          [&](const CBI& c) {
            if (c.a < 0.0 || c.b < 0.0) {
              fail(ErrorKind::InvalidModel, std::string("model.") + (c.a < 0.0 ? "a" : "b") + " must be >= 0");
            }
            d.sigma = sqrt_2a(c.a);
            d.drift = ScalarFn::affine(c.beta, c.b);
            if (c.nu0) {
              d.channels.push_back(thinned("N0", NoiseId::N0, *c.nu0, RateKernel::linear(1.0), h0_monotone));
            }
            if (c.nu1) {
              d.channels.push_back(thinned("N1", NoiseId::N1, *c.nu1, RateKernel::constant(1.0), h1_monotone));
            }
          },
          [&](const StableCBI& s) { add_stable_cbi(d, s, *this); },
          [&](const LevyDriven& l) {
            d.levy_form = true;
            d.sigma = l.sigma;
            d.drift = l.b;
            if (l.mu0) d.channels.push_back(scaled("z0", NoiseId::N0, *l.mu0, l.phi0, h0_monotone));
            if (l.mu1) d.channels.push_back(scaled("z1", NoiseId::N1, *l.mu1, l.phi1, h1_monotone));
            if (l.nu0) d.channels.push_back(proportional("y0", NoiseId::N0, *l.nu0));
            if (l.nu1) d.channels.push_back(proportional("y1", NoiseId::N1, *l.nu1));
          },
          [&](const CBIE& e) {
            add_stable_cbi(d, e.base, *this);
            if (e.emigration) d.channels.push_back(proportional("emigration", NoiseId::N1, *e.emigration));
          },
      },
      form);
  if (!validate) return d;

  // Boundary behaviour at x = 0.
  if (std::fabs(d.sigma(0.0)) > 1e-12) {
    fail(ErrorKind::InvalidModel, "model.sigma: sigma(0) must be 0, got " + std::to_string(d.sigma(0.0)));
  }
  if (d.drift(0.0) < 0.0) {
    fail(ErrorKind::InvalidModel, "model.b: b(0) must be >= 0, got " + std::to_string(d.drift(0.0)));
  }
  for (const auto& c : d.channels) {
    check_integrability(c.measure);
    if (c.compensated() && c.action != JumpAction::Proportional && c.factor(0.0) != 0.0) {
      fail(ErrorKind::InvalidModel, "model channel " + c.name +
                                        ": compensated jump intensity must vanish at x = 0");
    }
    if (c.action == JumpAction::Scaled && c.scale(0.0) < 0.0) {
      fail(ErrorKind::InvalidModel, "model channel " + c.name + ": phi must be non-negative");
    }
    if (c.action == JumpAction::Proportional && c.measure.support_max() > 1.0) {
      fail(ErrorKind::InvalidModel, "model channel " + c.name +
                                        ": emigration marks must lie in (0, 1]");
    }
  }
  return d;
}

namespace presets {

ModelSpec cir(double a, double b, double beta) {
  ModelSpec m;
  m.name = "cir";
  m.form = CBI{a, b, beta, std::nullopt, std::nullopt};
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec cbi(double a, double b, double beta) {
  ModelSpec m;
  m.name = "cbi";
  m.form = CBI{a, b, beta, JumpMeasure::stable(1.0, 1.5),
               JumpMeasure::cpp(1.0, PointMass{2.0})};
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec stable_cbi(double a, double b, double beta, double c, double alpha) {
  ModelSpec m;
  m.name = "stable_cbi";
  m.form = StableCBI{a, b, beta, c, alpha, JumpMeasure::cpp(1.0, ExponentialLaw{1.0})};
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec levy() {
  ModelSpec m;
  m.name = "levy";
  LevyDriven l;
  l.sigma = ScalarFn::affine(0.3, 0.0);
  l.b = ScalarFn::affine(-0.5, 1.0);
  l.phi0 = ScalarFn::affine(0.5, 0.0);
  l.phi1 = ScalarFn::constant(1.0);
  l.mu0 = JumpMeasure::cpp(1.0, ExponentialLaw{1.0}, MeasureRole::Compensated);
  l.mu1 = JumpMeasure::cpp(1.0, PointMass{0.5});
  l.nu0 = JumpMeasure::cpp(2.0, UniformLaw{0.0, 0.5}, MeasureRole::Compensated);
  l.nu1 = JumpMeasure::cpp(1.0, PointMass{0.3});
  m.form = l;
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec geometric(double sigma, double b) {
  ModelSpec m;
  m.name = "geometric";
  LevyDriven l;
  l.sigma = ScalarFn::affine(sigma, 0.0);
  l.b = ScalarFn::affine(b, 0.0);
  l.phi0 = ScalarFn::affine(1.0, 0.0);
  l.phi1 = ScalarFn::zero();
  l.mu0 = JumpMeasure::cpp(1.0, ExponentialLaw{0.5}, MeasureRole::Compensated);
  l.nu0 = JumpMeasure::cpp(1.0, UniformLaw{0.0, 0.5}, MeasureRole::Compensated);
  m.form = l;
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

ModelSpec cbie() {
  ModelSpec m = stable_cbi();
  m.name = "cbie";
  m.form = CBIE{std::get<StableCBI>(m.form), JumpMeasure::cpp(1.0, UniformLaw{0.0, 1.0})};
  return m;
}

ModelSpec bounded() {
  ModelSpec m;
  m.name = "bounded";
  GeneralJump g;
  g.sigma = ScalarFn(ScalarFn::Saturating{0.5});
  g.b = ScalarFn::constant(1.0);
  g.h0 = RateKernel{ScalarFn(ScalarFn::CappedLinear{1.0, 1.0}), 0.0};
  g.h1 = RateKernel::constant(1.0);
  g.mu0 = JumpMeasure::cpp(1.0, PointMass{0.5}, MeasureRole::Compensated);
  g.mu1 = JumpMeasure::cpp(1.0, PointMass{0.5});
  m.form = g;
  m.h0_monotone = m.h1_monotone = true;
  return m;
}

std::vector<std::string> names() {
  return {"cir", "cbi", "stable_cbi", "levy", "geometric", "cbie", "bounded"};
}

ModelSpec by_name(const std::string& name) {
  if (name == "cir") return cir();
  if (name == "cbi") return cbi();
  if (name == "stable_cbi") return stable_cbi();
  if (name == "levy") return levy();
  if (name == "geometric") return geometric();
  if (name == "cbie") return cbie();
  if (name == "bounded") return bounded();
  fail(ErrorKind::Config, "model.preset: unknown preset '" + name + "'");
}

}  // namespace presets

}  // namespace nnjump
