#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace servo {

/// SplitMix64 step, used to derive independent per-run seeds from a master
/// seed without collisions between nearby indices.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for run `index` of a named batch lane (e.g. "filtered").
/// Documented contract: run_seed = splitmix64(master ^ splitmix64(fnv1a64(lane) + index)).
/// The lane hash keeps filtered/unfiltered streams apart at equal indices.
inline std::uint64_t derive_run_seed(std::uint64_t master,
                                     std::string_view lane,
                                     std::uint32_t index) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : lane) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return splitmix64(master ^ splitmix64(h + index));
}

/// Deterministic random stream. std::mt19937_64 is bit-exact by standard;
/// the uniform and normal transforms below are fixed here (the standard
/// library distributions are implementation-defined) so that identical seeds
/// give identical draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller without caching: consumes exactly two uniforms per draw.
  double normal(double mean, double stddev) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace servo
