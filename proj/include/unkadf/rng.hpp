#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace unkadf {

namespace detail {
// splitmix64, used only to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// The one pseudo-random generator of the toolkit: std::mt19937_64 with
/// hand-rolled uniform/normal extraction so that a (seed, config) pair
/// reproduces the same stream on every platform. Standard-library
/// distributions are implementation-defined and are not used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53 bits of entropy.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Integer in [0, n). Modulo bias is < 2^-40 for every n used here; the
  /// contract that matters is determinism, not perfect uniformity.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  /// Fisher-Yates shuffle driven by this generator.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Independent generator for a named sub-stream. Derived from the seed this
  /// generator was constructed with, so fork order does not matter.
  Rng fork(std::uint64_t stream) const {
    return Rng(detail::mix64(seed_ ^ detail::mix64(stream)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace unkadf
