#pragma once
#include <cstdint>
#include <limits>

#include "sg/vertex.hpp"

namespace sg {

// Counter-based stream: output i is mix64(key + i*PHI), i.e. splitmix64
// started at a per-stream key. Streams are addressed by (master_seed,
// stream_index); identical addresses replay identical sequences, so a walk
// can be paused and resumed by storing (stream, counter). Thread count never
// enters the construction.
struct RngStream {
  uint64_t key = 0;
  uint64_t counter = 0;

  static constexpr uint64_t PHI = 0x9E3779B97F4A7C15ull;

  static RngStream from(uint64_t master_seed, uint64_t stream_index) {
    RngStream r;
    r.key = mix64(master_seed + 0xD1B54A32D192ED03ull * (stream_index + 1));
    r.counter = 0;
    return r;
  }

  // derive a child master seed (used for per-row sweep seeds)
  static uint64_t derive_seed(uint64_t master_seed, uint64_t salt) {
    return mix64(mix64(master_seed ^ 0xA0761D6478BD642Full) + salt * PHI);
  }

  uint64_t next() { return mix64(key + (++counter) * PHI); }

  // unbiased bounded draw (Lemire)
  uint32_t uniform_below(uint32_t m) {
    uint64_t x = next();
    __uint128_t prod = (__uint128_t)x * m;
    uint64_t lo = (uint64_t)prod;
    if (lo < m) {
      uint64_t t = (0 - uint64_t(m)) % m;
      while (lo < t) {
        x = next();
        prod = (__uint128_t)x * m;
        lo = (uint64_t)prod;
      }
    }
    return uint32_t(prod >> 64);
  }

  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  // UniformRandomBitGenerator interface, for std distributions
  using result_type = uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<uint64_t>::max();
  }
  result_type operator()() { return next(); }
};

} // namespace sg
