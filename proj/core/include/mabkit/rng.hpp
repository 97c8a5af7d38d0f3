#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace mabkit {

/// Seeded random stream with explicit, platform-independent distributions.
///
/// Standard-library distributions (std::normal_distribution etc.) are
/// implementation-defined, which would make logged runs differ between
/// compilers. All draws here are defined purely in terms of the mt19937_64
/// bit stream, so a (seed, call sequence) pair reproduces bit-identically
/// everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Counter-based stream derivation: replication i of a master seed gets
  /// its own independent stream regardless of scheduling order.
  static Rng derive(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be >= 1.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) {
      throw std::invalid_argument("uniform_int bound must be >= 1");
    }
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return draw % bound;
  }

  /// True with probability p.
  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via the polar method; second draw of each pair cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds before they reach the
  // engine.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed for stream number `stream` of a master seed. Counter-based, so any
/// subset of streams can be regenerated independently and in any order.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t stream) {
  return master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
}

inline Rng Rng::derive(std::uint64_t master_seed, std::uint64_t stream) {
  return Rng(derive_stream_seed(master_seed, stream));
}

}  // namespace mabkit
