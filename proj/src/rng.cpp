#include "conewalk/rng.hpp"

#include <cmath>

namespace conewalk::rng {

namespace {
constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t* lo, uint32_t* hi) {
  uint64_t prod = static_cast<uint64_t>(a) * b;
  *lo = static_cast<uint32_t>(prod);
  *hi = static_cast<uint32_t>(prod >> 32);
}

inline void round_once(uint32_t ctr[4], const uint32_t key[2]) {
  uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM0, ctr[0], &lo0, &hi0);
  mul_hi_lo(kPhiloxM1, ctr[2], &lo1, &hi1);
  uint32_t out[4];
  out[0] = hi1 ^ ctr[1] ^ key[0];
  out[1] = lo1;
  out[2] = hi0 ^ ctr[3] ^ key[1];
  out[3] = lo0;
  ctr[0] = out[0];
  ctr[1] = out[1];
  ctr[2] = out[2];
  ctr[3] = out[3];
}
}  // namespace

void philox4x32_10(const uint32_t ctr_in[4], const uint32_t key_in[2], uint32_t out[4]) {
  uint32_t ctr[4] = {ctr_in[0], ctr_in[1], ctr_in[2], ctr_in[3]};
  uint32_t key[2] = {key_in[0], key_in[1]};
  for (int r = 0; r < 10; ++r) {
    round_once(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  out[0] = ctr[0];
  out[1] = ctr[1];
  out[2] = ctr[2];
  out[3] = ctr[3];
}

Stream::Stream(uint64_t master_seed, uint64_t purpose, uint64_t stream_index) {
  uint64_t k = mix64(master_seed ^ mix64(purpose));
  key_[0] = static_cast<uint32_t>(k);
  key_[1] = static_cast<uint32_t>(k >> 32);
  stream_[0] = static_cast<uint32_t>(stream_index);
  stream_[1] = static_cast<uint32_t>(stream_index >> 32);
}

void Stream::refill() {
  uint32_t ctr[4] = {static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
                     stream_[0], stream_[1]};
  philox4x32_10(ctr, key_, buf_);
  ++counter_;
  have_ = 4;
}

uint64_t Stream::next_u64() {
  if (have_ < 2) refill();
  uint64_t v = (static_cast<uint64_t>(buf_[have_ - 1]) << 32) | buf_[have_ - 2];
  have_ -= 2;
  return v;
}

double Stream::next_gaussian() {
  if (have_gauss_) {
    have_gauss_ = false;
    return cached_gauss_;
  }
  double u1 = next_open_double();
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_gauss_ = r * std::sin(a);
  have_gauss_ = true;
  return r * std::cos(a);
}

}  // namespace conewalk::rng
