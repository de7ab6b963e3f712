#pragma once

// Seeded randomness used everywhere a module promises reproducibility.
// std::mt19937_64's output sequence is pinned by the standard, but the
// std::*_distribution adaptors are not, so the draws below are derived
// from raw engine output only. Same seed, same sequence, on any platform.

#include <cstdint>
#include <random>
#include <vector>

namespace confsched {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). n must be > 0.
  std::size_t next_index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(next_double() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Uniform integer in [lo, hi].
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_index(static_cast<std::size_t>(hi - lo + 1)));
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = next_index(i);
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace confsched
