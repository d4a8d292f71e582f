#include "rpspin/rng.hpp"

namespace rpspin {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index), StreamRng::kStreamTag};
  return std::mt19937_64(seq);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t index)
    : engine_(make_engine(seed, index)) {}

std::uint64_t StreamRng::below(std::uint64_t n) {
  // Largest multiple of n representable, so the accepted range is unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace rpspin
