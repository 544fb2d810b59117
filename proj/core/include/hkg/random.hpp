#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace hkg {

// Portable seeded sampling. std::uniform_int_distribution and std::shuffle
// are implementation-defined, so draws are built directly on the
// mt19937_64 output sequence, which the standard pins down.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Moves a uniform sample of size k into v[0..k).
  template <class T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) {
    for (std::size_t i = 0; i < k && i < v.size(); ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hkg
