#pragma once

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace exclab {

/// SplitMix64 finalizer; used to turn (seed, counters) into independent
/// generator seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica, std::uint64_t stream = 0) {
  return mix64(mix64(mix64(master) ^ replica) + 0x632be59bd9b4e019ULL * (stream + 1));
}

/// Seeded generator with the handful of variates the samplers need.
/// Streams for replica r / sub-stream s are derived from the master seed
/// alone, so results do not depend on how replicas are spread over workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  static Rng for_stream(std::uint64_t master, std::uint64_t replica, std::uint64_t stream = 0) {
    return Rng(derive_seed(master, replica, stream));
  }

  double normal() { return normal_(engine_); }
  /// Uniform on (0,1), never exactly 0.
  double uniform() {
    double u;
    do {
      u = uniform_(engine_);
    } while (u <= 0.0);
    return u;
  }
  double exponential() { return exponential_(engine_); }
  std::uint64_t bits() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{};
  boost::random::uniform_01<double> uniform_{};
  boost::random::exponential_distribution<double> exponential_{};
};

}  // namespace exclab
