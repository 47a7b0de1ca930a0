#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace limecert {

using int128 = __int128;
using uint128 = unsigned __int128;

// All protocol arithmetic runs on scaled 64-bit integers ("raw" values):
// a real number q is represented as raw = round(q * scale). Every operation
// below is a pure integer function, so results are identical on any platform.

inline int64_t round_div_half_away(int128 num, int128 den) {
  if (den == 0) throw std::domain_error("round_div_half_away: zero divisor");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int128 q;
  if (num >= 0) {
    q = (num + den / 2) / den;
  } else {
    q = -((-num + den / 2) / den);
  }
  if (q > std::numeric_limits<int64_t>::max() ||
      q < std::numeric_limits<int64_t>::min()) {
    throw std::range_error("round_div_half_away: quotient overflows int64");
  }
  return static_cast<int64_t>(q);
}

struct FixedPoint {
  int64_t raw = 0;
  int64_t scale = 1;

  friend bool operator==(const FixedPoint&, const FixedPoint&) = default;
};

// round-half-away-from-zero quantization of a real value.
inline int64_t quantize(double x, int64_t scale) {
  if (scale <= 0) throw std::domain_error("quantize: scale must be positive");
  double v = x * static_cast<double>(scale);
  if (!(v < 9.2e18 && v > -9.2e18)) {
    throw std::range_error("quantize: value out of range at scale " +
                           std::to_string(scale));
  }
  double r = (v >= 0.0) ? std::floor(v + 0.5) : -std::floor(-v + 0.5);
  return static_cast<int64_t>(r);
}

inline double dequantize(int64_t raw, int64_t scale) {
  return static_cast<double>(raw) / static_cast<double>(scale);
}

inline FixedPoint fp_from_real(double x, int64_t scale) {
  return FixedPoint{quantize(x, scale), scale};
}

inline int64_t fp_add(int64_t a, int64_t b) { return a + b; }
inline int64_t fp_sub(int64_t a, int64_t b) { return a - b; }

// (a/S)*(b/S) re-quantized to scale S with a single rounding.
inline int64_t fp_mul(int64_t a, int64_t b, int64_t scale) {
  return round_div_half_away(static_cast<int128>(a) * b, scale);
}

// (a/S)/(b/S) re-quantized to scale S with a single rounding.
inline int64_t fp_div(int64_t a, int64_t b, int64_t scale) {
  if (b == 0) throw std::domain_error("fp_div: division by zero");
  return round_div_half_away(static_cast<int128>(a) * scale, b);
}

// Dot product of two raw vectors at a common scale. The products are
// accumulated exactly in 128 bits and rescaled once at the end, so the
// result carries a single rounding.
inline int64_t fp_dot(std::span<const int64_t> a, std::span<const int64_t> b,
                      int64_t scale) {
  if (a.size() != b.size()) throw std::invalid_argument("fp_dot: size mismatch");
  int128 acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<int128>(a[i]) * b[i];
  }
  return round_div_half_away(acc, scale);
}

// Exact 128-bit sum of products, no rescale. Used where the caller wants to
// defer the division (duality gap, feasibility rows).
inline int128 dot_i128(std::span<const int64_t> a, std::span<const int64_t> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot_i128: size mismatch");
  int128 acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<int128>(a[i]) * b[i];
  }
  return acc;
}

inline uint64_t isqrt_u128(uint128 n) {
  if (n == 0) return 0;
  uint128 x = n;
  uint128 y = (x + 1) >> 1;
  while (y < x) {
    x = y;
    y = (x + n / x) >> 1;
  }
  return static_cast<uint64_t>(x);
}

// sqrt(a/S) re-quantized to scale S, rounded to nearest: the integer r
// minimizing |r/S - sqrt(a/S)|, found via floor-sqrt of a*S plus a
// half-step comparison (r vs r+1 decided by (2r+1)^2 <= 4*a*S).
inline int64_t fp_sqrt(int64_t a, int64_t scale) {
  if (a < 0) throw std::domain_error("fp_sqrt: negative input");
  uint128 target = static_cast<uint128>(a) * static_cast<uint128>(scale);
  uint64_t r = isqrt_u128(target);
  // round up when (r + 1/2)^2 <= target, i.e. 4*target >= (2r+1)^2
  uint128 lhs = static_cast<uint128>(2 * r + 1) * (2 * r + 1);
  if (static_cast<uint128>(target) * 4 >= lhs) ++r;
  return static_cast<int64_t>(r);
}

struct RawMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<int64_t> a;

  RawMatrix() = default;
  RawMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0) {}

  int64_t& at(size_t i, size_t j) { return a[i * cols + j]; }
  int64_t at(size_t i, size_t j) const { return a[i * cols + j]; }
  std::span<const int64_t> row(size_t i) const {
    return std::span<const int64_t>(a).subspan(i * cols, cols);
  }
  std::span<int64_t> row(size_t i) {
    return std::span<int64_t>(a).subspan(i * cols, cols);
  }

  friend bool operator==(const RawMatrix&, const RawMatrix&) = default;
};

}  // namespace limecert
