#ifndef BLKORTH_RNG_HPP
#define BLKORTH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace blkorth {

/// splitmix64 step; used to derive independent sub-stream seeds from one
/// user-facing seed so that trials/restarts do not share state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator with a platform-independent raw sequence (mt19937_64)
/// and explicit uniform/normal transforms, so the produced streams depend
/// only on the seed and not on libstdc++ distribution internals.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform index in [0, n) via the multiply-shift range reduction.
  std::size_t uniform_index(std::size_t n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

  /// Rademacher +-1.
  double sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace blkorth

#endif // BLKORTH_RNG_HPP
