#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace asense {

// splitmix64 finalizer. Used for seed derivation so that any (seed, index)
// combination maps to a decorrelated stream seed on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b ^ 0xd6e8feb86659fd93ull));
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return combine_seed(combine_seed(a, b), c);
}

// FNV-1a, for seeding per-actuator jitter from string ids.
inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic random source. mt19937_64 output is fully specified by the
// standard; the float mappings below avoid std::uniform_real_distribution,
// whose algorithm is implementation-defined, so identical seeds produce
// bit-identical sequences on every toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [-1, 1).
  double uniform_signed() { return 2.0 * uniform() - 1.0; }

  // Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant for the
  // small n used here; the modulo form keeps the mapping portable.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // In-place Fisher-Yates. std::shuffle is not used because its algorithm is
  // implementation-defined.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace asense
