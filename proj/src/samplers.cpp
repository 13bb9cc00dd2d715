#include "nnjump/samplers.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nnjump/error.hpp"

namespace nnjump {

std::string_view to_string(StreamChannel c) {
  switch (c) {
    case StreamChannel::Brownian: return "brownian";
    case StreamChannel::Jumps0: return "jumps0";
    case StreamChannel::Jumps1: return "jumps1";
    case StreamChannel::Thinning: return "thinning";
  }
  return "?";
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_key(std::uint64_t root_seed, std::uint64_t path_id, StreamChannel channel) {
  const std::uint64_t lane = (path_id << 2) | static_cast<std::uint64_t>(channel);
  return mix64(mix64(root_seed) ^ lane);
}

RandomStream::RandomStream(std::uint64_t root_seed, std::uint64_t path_id, StreamChannel channel)
    : root_seed_(root_seed),
      path_id_(path_id),
      channel_(channel),
      engine_(substream_key(root_seed, path_id, channel)) {}

double brownian_increment(RandomStream& s, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "brownian increment needs dt > 0");
  return std::sqrt(dt) * s.normal();
}

double stable_laplace_exponent(double alpha, double c, double lambda) {
  return c * std::pow(lambda, alpha) * std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0));
}

double stable_increment(RandomStream& s, double alpha, double c, double dt) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    fail(ErrorKind::InvalidAlpha, "stable increment needs 1 < alpha < 2");
  }
  if (!(c > 0.0) || !(dt > 0.0)) {
    fail(ErrorKind::InvalidArgument, "stable increment needs c > 0 and dt > 0");
  }
  constexpr double pi = std::numbers::pi;
  const double t = std::tan(pi * alpha / 2.0);
  const double B = std::atan(t) / alpha;
  const double S = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
  double u = 0.0;
  do {
    u = s.uniform();
  } while (u == 0.0);
  double W = 0.0;
  do {
    W = s.exponential();
  } while (W == 0.0);
  const double V = pi * (u - 0.5);
  const double a = alpha * (V + B);
  const double X = S * std::sin(a) / std::pow(std::cos(V), 1.0 / alpha) *
                   std::pow(std::cos(V - a) / W, (1.0 - alpha) / alpha);
  const double scale = std::pow(c * dt * std::tgamma(2.0 - alpha) *
                                    std::fabs(std::cos(pi * alpha / 2.0)) / (alpha * (alpha - 1.0)),
                                1.0 / alpha);
  return scale * X;
}

std::vector<JumpEvent> big_jump_schedule(RandomStream& s, const JumpMeasure& m, double eps,
                                         double horizon, double dominating_rate, NoiseId channel) {
  std::vector<JumpEvent> out;
  if (!(horizon > 0.0) || !(dominating_rate > 0.0)) return out;
  const double tail = m.moment(0, eps, std::numeric_limits<double>::infinity());
  if (!(tail > 0.0)) {
    fail(ErrorKind::EmptyTail, "no mass above the cutoff in " + m.describe());
  }
  const bool comp = m.role() == MeasureRole::Compensated;
  double t = 0.0;
  for (;;) {
    t += s.exponential() / dominating_rate;
    if (t > horizon) break;
    JumpEvent e;
    e.time = t;
    e.size = m.sample_above(eps, s.uniform());
    e.channel = channel;
    e.compensated = comp && channel == NoiseId::N0;
    out.push_back(e);
  }
  return out;
}

bool thinning_accept(RandomStream& s, double state_rate, double dominating_state_rate) {
  if (!(dominating_state_rate > 0.0)) {
    fail(ErrorKind::InvalidArgument, "thinning needs a positive dominating rate");
  }
  if (state_rate > dominating_state_rate * (1.0 + 1e-12)) {
    fail(ErrorKind::RateExceedsDominator, "state rate exceeds the thinning dominator");
  }
  return s.uniform() * dominating_state_rate < state_rate;
}

}  // namespace nnjump
