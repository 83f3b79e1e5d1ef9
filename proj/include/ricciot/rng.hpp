#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace ricciot {

/// Counter-based generator: the i-th output of a stream is a pure function of
/// (key, i). Streams are derived from (seed, stream id), so any number of
/// workers can draw reproducibly without sharing state.
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

  /// Child stream; children of distinct ids are independent of each other
  /// and of the parent.
  Rng split(std::uint64_t stream_id) const {
    Rng child(0);
    child.key_ = mix(key_ + mix(stream_id + kStreamSalt));
    return child;
  }

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed).split(stream_id); }

  result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_positive()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  std::int64_t poisson(double mean);

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0xD1B54A32D192ED03ULL;
  static constexpr std::uint64_t kStreamSalt = 0x8CB92BA72F3D8DD7ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// 64-bit seed for a derived sub-experiment; a pure function of (seed, id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) { return Rng::stream(seed, id)(); }

inline std::int64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(*this);
}

}  // namespace ricciot
