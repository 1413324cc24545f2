#pragma once

#include <cstdint>

#include "conewalk/common.hpp"

namespace conewalk::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A Stream is keyed by (master seed, purpose, stream index); draws are a pure
// function of the key and a 64-bit draw counter, so any path/worker layout
// that assigns one stream per path reproduces bit-identical results.
class Stream {
 public:
  Stream(uint64_t master_seed, uint64_t purpose, uint64_t stream_index);

  uint64_t next_u64();
  // 53-bit mantissa uniform in [0,1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }
  // uniform in (0,1], safe as a log() argument
  double next_open_double() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }
  double next_gaussian();

 private:
  void refill();

  uint32_t key_[2];
  uint32_t stream_[2];
  uint64_t counter_ = 0;
  uint32_t buf_[4];
  int have_ = 0;
  double cached_gauss_ = 0.0;
  bool have_gauss_ = false;
};

// Raw block: one Philox evaluation of the given counter/key/stream words.
void philox4x32_10(const uint32_t ctr[4], const uint32_t key[2], uint32_t out[4]);

}  // namespace conewalk::rng
