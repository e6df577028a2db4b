#pragma once

#include <complex>
#include <cstdint>

namespace pulsepair {

// Seed expansion (splitmix64). Also used to derive independent stream seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stable seed for a (stream, index) pair under one master seed. Frame
// generation seeds every frame independently so that emission order and
// parallel scheduling cannot change the sample streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t x = master ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  splitmix64_next(x);
  x ^= 0xD1B54A32D192ED03ULL * (index + 1);
  return splitmix64_next(x);
}

// xoshiro256++ generator. Hand-rolled instead of <random> engines/distributions
// so streams are identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& w : state_) w = splitmix64_next(seed);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, 2*pi).
  double uniform_angle() { return uniform01() * 6.283185307179586476925286766559; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via the polar method; second deviate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
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
    have_spare_ = true;
    return u * m;
  }

  // Circular complex Gaussian with the given per-component std deviation.
  std::complex<double> normal_complex(double sigma_component) {
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = sigma_component * std::sqrt(-2.0 * std::log(s) / s);
    return {u * m, v * m};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pulsepair
