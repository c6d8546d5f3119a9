#pragma once

#include <cstdint>
#include <random>

namespace hetsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash_mix(hash_mix(a, b), c);
}

// Seeded engine with named substreams so consumers stay independent of each
// other's draw counts.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  SeededRng(std::uint64_t seed, std::uint64_t stream) : engine_(hash_mix(seed, stream)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double exponential(double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(engine_);
  }
  double normal(double mean, double sigma) {
    return std::normal_distribution<double>(mean, sigma)(engine_);
  }
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<int>(mean)(engine_);
  }
  std::uint64_t integer(std::uint64_t n) {  // uniform in [0, n)
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Standard normal frozen per (seed, key_a, key_b); repeated queries return the
// identical value. Box-Muller over two splitmix-derived uniforms.
inline double frozen_standard_normal(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
  const std::uint64_t h = hash_mix(seed, key_a, key_b);
  const std::uint64_t u1_bits = splitmix64(h);
  const std::uint64_t u2_bits = splitmix64(u1_bits ^ 0xda942042e4dd58b5ULL);
  // u1 in (0,1], u2 in [0,1)
  const double u1 = (static_cast<double>(u1_bits >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(u2_bits >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace hetsim
