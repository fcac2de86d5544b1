#pragma once

#include <cstdint>

namespace permits {

// splitmix64 (Steele, Lea, Vigna). Small, fast, and fully specified, so
// every output file is reproducible bit-for-bit across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Independent stream for work unit `index` under a master seed. The split is
  // a pure function of (seed, index), so the set of streams does not depend on
  // execution order or worker count.
  static SplitMix64 stream(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 mixer(master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace permits
