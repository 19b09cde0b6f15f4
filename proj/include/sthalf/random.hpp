// Deterministic randomness helpers. mt19937_64's raw output is pinned by the
// standard; the distribution adaptors here avoid std::*_distribution, whose
// results differ across standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace sthalf {

// Derives the seed of sub-stream `index` from a base seed (SplitMix64
// finalizer). Stream k never changes when more streams are added, so adding
// trials or rounds cannot perturb earlier ones.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Unbiased draw from [0, n) by rejection.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index needs n >= 1");
  const std::uint64_t span = n;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t overhang = (max % span + 1) % span;  // 2^64 mod span
  std::uint64_t r = gen();
  while (overhang != 0 && r > max - overhang) r = gen();
  return static_cast<std::size_t>(r % span);
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform_real01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller; two draws per variate, the sine branch is discarded.
inline double standard_normal(std::mt19937_64& gen) {
  const double u1 = 1.0 - uniform_real01(gen);  // (0, 1], keeps the log finite
  const double u2 = uniform_real01(gen);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Fisher-Yates with the rejection sampler above; std::shuffle's draw sequence
// is implementation-defined, this one is reproducible everywhere.
template <typename T>
void seeded_shuffle(std::vector<T>& values, std::mt19937_64& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(gen, i)]);
  }
}

}  // namespace sthalf
