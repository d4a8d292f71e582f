#pragma once

#include <cstdint>
#include <random>

namespace rpspin {

/// Per-trajectory random stream.
///
/// Stream `index` of master seed `seed` is a std::mt19937_64 initialized from
/// std::seed_seq{lo(seed), hi(seed), lo(index), hi(index), kStreamTag}, where
/// lo/hi are the 32-bit halves. Both seed_seq and mt19937_64 are fully
/// specified by the standard, so a stream depends only on (seed, index) and
/// not on the platform, the thread that runs it, or the order streams are made.
class StreamRng {
 public:
  static constexpr std::uint32_t kStreamTag = 0x52505452u;

  StreamRng(std::uint64_t seed, std::uint64_t index);

  /// Uniform double in [0, 1) built from the top 53 bits of one engine output.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rpspin
