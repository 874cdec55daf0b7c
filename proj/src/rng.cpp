#include "chirf/rng.hpp"

#include <stdexcept>

#include "chirf/special.hpp"

namespace chirf {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, c[0], lo0, hi0);
  mul_hi_lo(kPhiloxM4x32B, c[2], lo1, hi1);
  std::uint32_t r0 = hi1 ^ c[1] ^ k[0];
  std::uint32_t r1 = lo1;
  std::uint32_t r2 = hi0 ^ c[3] ^ k[1];
  std::uint32_t r3 = lo0;
  c[0] = r0;
  c[1] = r1;
  c[2] = r2;
  c[3] = r3;
}

}  // namespace

void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
  std::uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  std::uint32_t k[2] = {key[0], key[1]};
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    if (round < 9) {
      k[0] += kPhiloxW32A;
      k[1] += kPhiloxW32B;
    }
  }
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

void RngStream::refill() {
  std::uint32_t counter[4] = {
      static_cast<std::uint32_t>(block_),
      static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32),
  };
  std::uint32_t key[2] = {
      static_cast<std::uint32_t>(seed_),
      static_cast<std::uint32_t>(seed_ >> 32),
  };
  philox4x32_10(counter, key, buf_);
  ++block_;
  buf_pos_ = 0;
}

double RngStream::gamma(double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("gamma: alpha must be >= 1");
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_chi_variable(int k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("sample_chi_variable: k must be >= 1");
  if (k == 1) return std::abs(rng.normal());
  if (k <= 8) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      double g = rng.normal();
      s += g * g;
    }
    return std::sqrt(s);
  }
  return std::sqrt(2.0 * rng.gamma(0.5 * k));
}

double sample_truncated_upper_normal(double t, RngStream& rng) {
  double p = gaussian_upper_tail(t) * rng.uniform();
  return -normal_quantile(p);
}

}  // namespace chirf
