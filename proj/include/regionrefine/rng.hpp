#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rr {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-item stream seed, independent of how items are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) {
  return splitmix64(global_seed ^ splitmix64(index + 0x51ED2701ull));
}

// MT19937-64 (std::mt19937_64, whose output sequence the standard pins down)
// with hand-rolled distributions, since std:: distributions are
// implementation-defined and would break cross-platform golden hashes.
//   uniform()        = (next() >> 11) * 2^-53           in [0, 1)
//   uniform_int(a,b) = a + next() % (b - a + 1)
//   normal()         = Box-Muller on two uniform() draws, cosine branch
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rr
