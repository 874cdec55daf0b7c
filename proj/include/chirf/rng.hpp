#ifndef CHIRF_RNG_HPP
#define CHIRF_RNG_HPP

#include <cstdint>
#include <cmath>

namespace chirf {

// Counter-based stream built on Philox4x32-10 (Salmon et al., SC 2011).
//
// Layout: key = 64-bit seed, counter = (block_lo, block_hi, stream_lo,
// stream_hi).  Identical (seed, stream_id) reproduce the same sequence
// bit for bit; distinct stream_ids occupy disjoint counter prefixes and
// are statistically independent.  seek_block() jumps inside a stream,
// which is how batch workers get non-overlapping sub-sequences without
// any shared state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // Position the stream at an absolute 128-bit-block index. Discards any
  // buffered output and the cached Box-Muller value.
  void seek_block(std::uint64_t block) {
    block_ = block;
    buf_pos_ = 4;
    have_cached_normal_ = false;
  }

  std::uint32_t next_u32() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on (0,1]; never returns 0 so log() is always safe.
  double uniform() {
    return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, one value cached per pair.
  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
  }

  // Gamma(alpha, 1) for alpha >= 1 (Marsaglia-Tsang squeeze).
  double gamma(double alpha);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int buf_pos_ = 4;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// One chi(k) draw, chi_k = sqrt(g_1^2 + ... + g_k^2).  Small k uses the
// literal sum of squares, large k a Gamma(k/2) draw.
double sample_chi_variable(int k, RngStream& rng);

// Draw from the standard normal conditioned on being >= t (inverse-CDF on
// the upper tail).
double sample_truncated_upper_normal(double t, RngStream& rng);

// Raw Philox4x32-10 block function, exposed for known-answer tests.
void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

}  // namespace chirf

#endif
