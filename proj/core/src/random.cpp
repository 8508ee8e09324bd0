#include "permchar/random.hpp"

namespace permchar {

std::uint64_t Stream::uniform_index(std::uint64_t bound) {
  // Lemire-style rejection keeps the result unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % bound;
}

Stream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index,
                     std::uint32_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32),
                    attempt, 0x9e3779b9u};
  return Stream(seq);
}

}  // namespace permchar
