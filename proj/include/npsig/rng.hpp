#pragma once

#include <cstdint>
#include <string_view>

namespace npsig {

//! 64-bit mixer of Steele, Lea and Flood (2014). Used to expand seeds and to
//! derive independent per-replicate child seeds.
struct split_mix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

//! xoshiro256++ (Blackman and Vigna, 2019), seeded via splitmix64 expansion.
//! Uniforms use the top 53 bits; normals use Marsaglia's polar method with
//! the usual pair cache. All draws are sequential and platform-independent
//! at the bit level except for libm rounding inside sqrt/log.
class rng {
public:
  explicit rng(std::uint64_t seed);

  std::uint64_t next_u64();
  //! Uniform on [0, 1).
  double uniform();
  //! Uniform on [lo, hi).
  double uniform(double lo, double hi);
  //! Standard normal draw.
  double normal();

  //! Child seed for replicate `index` of a study seeded with `master`.
  //! Defined as splitmix64(master XOR golden * (index + 1)); replicates can
  //! therefore run in any order or thread without changing their streams.
  static std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

  //! Recorded in reports so a run names the generator that produced it.
  static constexpr std::string_view identity = "xoshiro256++/splitmix64";

private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace npsig
