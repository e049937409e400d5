#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace r1mi {

// Deterministic random stream. The engine is std::mt19937_64 (whose output
// sequence is pinned by the standard) and all variate transforms are done
// here rather than through std::*_distribution, whose algorithms are
// implementation-defined. Identical seeds therefore give identical draws
// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch only).
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Index drawn with the given nonnegative weights (need not be normalized).
  std::size_t pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("Rng::pick: weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 eng_;
};

// SplitMix64 step, used to derive independent per-sample streams from a
// root seed without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace r1mi
