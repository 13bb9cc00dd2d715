#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "nnjump/measures.hpp"

namespace nnjump {

enum class StreamChannel : std::uint8_t { Brownian = 0, Jumps0 = 1, Jumps1 = 2, Thinning = 3 };

std::string_view to_string(StreamChannel c);

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);
/// Seed of the (root_seed, path_id, channel) substream. For a fixed root the
/// map is injective in (path_id, channel) for path_id < 2^62.
std::uint64_t substream_key(std::uint64_t root_seed, std::uint64_t path_id, StreamChannel channel);

/// One independent random sequence. Each path owns one per channel.
class RandomStream {
 public:
  RandomStream(std::uint64_t root_seed, std::uint64_t path_id, StreamChannel channel);

  /// Uniform on [0, 1).
  double uniform() { return unif_(engine_); }
  double normal() { return norm_(engine_); }
  /// Exp(1).
  double exponential() { return expo_(engine_); }

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t path_id() const { return path_id_; }
  StreamChannel channel() const { return channel_; }

 private:
  std::uint64_t root_seed_;
  std::uint64_t path_id_;
  StreamChannel channel_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
  std::exponential_distribution<double> expo_{1.0};
};

/// The four channels of one path.
struct PathStreams {
  PathStreams(std::uint64_t root_seed, std::uint64_t path_id)
      : brownian(root_seed, path_id, StreamChannel::Brownian),
        jumps0(root_seed, path_id, StreamChannel::Jumps0),
        jumps1(root_seed, path_id, StreamChannel::Jumps1),
        thinning(root_seed, path_id, StreamChannel::Thinning) {}
  RandomStream brownian;
  RandomStream jumps0;
  RandomStream jumps1;
  RandomStream thinning;
};

enum class NoiseId : std::uint8_t { N0, N1 };

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;
  NoiseId channel = NoiseId::N0;
  bool compensated = false;
  bool operator==(const JumpEvent&) const = default;
};

/// N(0, dt) variate.
double brownian_increment(RandomStream& s, double dt);

/// Increment over dt of the centered spectrally positive stable process with
/// Levy measure c z^{-1-alpha} dz, 1 < alpha < 2 (Chambers-Mallows-Stuck).
double stable_increment(RandomStream& s, double alpha, double c, double dt);

/// log E[exp(-lambda X)] per unit time for that process:
/// c lambda^alpha Gamma(2 - alpha) / (alpha (alpha - 1)).
double stable_laplace_exponent(double alpha, double c, double lambda = 1.0);

/// Poisson times at `dominating_rate` on [0, horizon] with marks from m
/// restricted to (eps, inf). Marks of finite measures may use eps = 0.
std::vector<JumpEvent> big_jump_schedule(RandomStream& s, const JumpMeasure& m, double eps,
                                         double horizon, double dominating_rate,
                                         NoiseId channel = NoiseId::N0);

/// Bernoulli(state_rate / dominating_state_rate).
bool thinning_accept(RandomStream& s, double state_rate, double dominating_state_rate);

}  // namespace nnjump
