#pragma once

#include <cstdint>
#include <random>

namespace permchar {

// A seeded random stream. Draw conversions are done here rather than with
// the std distributions so that sequences are identical across standard
// library implementations.
class Stream {
 public:
  explicit Stream(std::seed_seq& seq) : engine_(seq) {}
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Stream for one Monte Carlo sample. The same (master_seed, sample_index,
// attempt) triple always gives the same stream, independent of which thread
// asks for it.
Stream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index,
                     std::uint32_t attempt = 0);

}  // namespace permchar
