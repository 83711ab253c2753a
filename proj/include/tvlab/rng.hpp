#ifndef TVLAB_RNG_HPP
#define TVLAB_RNG_HPP

#include <cstdint>

namespace tvlab {

/// Counter-based random substream: the value drawn for (seed, stream, i)
/// never depends on how work is split across threads.
class SubstreamRng {
public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace tvlab

#endif
