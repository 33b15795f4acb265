#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tss {

/// SplitMix64 finalizer; used to turn arbitrary integers into well-mixed seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives the seed of sub-stream `stream` from a root seed.
///
/// The mapping is a fixed counter-based split: streams for distinct indices
/// are independent of the order in which they are consumed, so replications
/// can run on parallel workers and still reproduce bit-identically.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

/// Deterministic random source: std::mt19937_64 (fully specified by the
/// standard) plus hand-rolled Marsaglia-polar normals, so identical seeds
/// reproduce identical draws on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in the open interval (0,1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw (Marsaglia polar method, one spare cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s <= 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Chi-squared draw with integer dof (sum of squared normals).
  double chi_squared(int dof) {
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double z = gaussian();
      s += z * z;
    }
    return s;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tss
