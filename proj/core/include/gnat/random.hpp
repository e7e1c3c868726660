#pragma once

#include <cstdint>
#include <random>

namespace gnat {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator with fixed, documented conversions.
///
/// The engine is std::mt19937_64, whose output sequence the C++ standard pins
/// down exactly. The std:: distributions are implementation-defined, so the
/// conversions to doubles and bounded integers are done here:
///   uniform()      = (next() >> 11) * 2^-53, in [0, 1)
///   exponential(r) = -log(1 - uniform()) / r
///   below(n)       = Lemire's multiply-shift with rejection
/// Independent named streams come from stream(seed, tag), which seeds the
/// engine with splitmix64(seed ^ splitmix64(tag)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t tag) {
    return Rng(splitmix64(seed ^ splitmix64(tag)));
  }

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate);
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Stream tags, so that adding a consumer never shifts another's draws.
namespace rng_tag {
inline constexpr std::uint64_t kPlacement = 0x706c6163;
inline constexpr std::uint64_t kConnectivity = 0x636f6e6e;
inline constexpr std::uint64_t kDelays = 0x64656c61;
inline constexpr std::uint64_t kPoisson = 0x706f6973;
inline constexpr std::uint64_t kPattern = 0x70617474;
inline constexpr std::uint64_t kShuffle = 0x73687566;
}  // namespace rng_tag

}  // namespace gnat
