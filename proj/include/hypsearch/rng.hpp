#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hypsearch {

// FNV-1a. Seed derivation must be stable across platforms and standard
// libraries, so std::hash is never used for it.
constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view label) {
  std::string key = std::to_string(master);
  key += '|';
  key += label;
  return fnv1a64(key);
}

// mt19937_64 with all distribution logic in this class; standard-library
// distributions are implementation-defined and would break cross-stdlib
// determinism.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 mantissa bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased index in [0, n) by rejection
  size_t index(size_t n) {
    uint64_t bound = static_cast<uint64_t>(n);
    uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      uint64_t r = gen_();
      if (r < limit) return static_cast<size_t>(r % bound);
    }
  }

  // standard normal, Box-Muller without caching the second draw
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Fisher-Yates
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hypsearch
