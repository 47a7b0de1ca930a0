#include "limecert/lookup_table.hpp"

#include <cmath>
#include <stdexcept>

#include "limecert/detmath.hpp"

namespace limecert {

int64_t LookupTable::at(size_t idx) const {
  if (idx >= entries.size()) {
    throw std::out_of_range("LookupTable::at: index " + std::to_string(idx) +
                            " outside table " + name);
  }
  return entries[idx];
}

LookupTable LookupTable::make_exp(int64_t scale, int64_t lo_raw,
                                  uint32_t size) {
  if (scale <= 0 || lo_raw >= 0 || size < 2) {
    throw std::invalid_argument("make_exp: need scale > 0, lo < 0, size >= 2");
  }
  LookupTable t;
  t.name = "exp";
  t.scale = scale;
  t.lo_raw = lo_raw;
  t.hi_raw = 0;
  t.idx_num = static_cast<int64_t>(size) - 1;
  t.idx_den = -lo_raw;
  t.entries.resize(size);
  for (uint32_t i = 0; i < size; ++i) {
    // grid key for entry i, rounded to the raw lattice
    int64_t key = lo_raw + round_div_half_away(
                               static_cast<int128>(i) * (-lo_raw), size - 1);
    t.entries[i] = quantize(det_exp(dequantize(key, scale)), scale);
  }
  return t;
}

LookupTable LookupTable::make_gauss_inv_cdf(uint32_t bits, int64_t scale,
                                            int64_t clamp_raw) {
  if (bits < 2 || bits > 20 || scale <= 0 || clamp_raw <= 0) {
    throw std::invalid_argument("make_gauss_inv_cdf: bad parameters");
  }
  size_t size = size_t{1} << bits;
  LookupTable t;
  t.name = "gauss_inv_cdf";
  t.scale = scale;
  t.lo_raw = 0;
  t.hi_raw = static_cast<int64_t>(size) - 1;
  t.idx_num = 1;
  t.idx_den = 1;
  t.entries.resize(size);
  double denom = std::ldexp(1.0, static_cast<int>(bits));
  for (size_t u = 0; u < size; ++u) {
    double p = (static_cast<double>(u) + 0.5) / denom;
    int64_t v = quantize(det_norm_inv(p), scale);
    if (v > clamp_raw) v = clamp_raw;
    if (v < -clamp_raw) v = -clamp_raw;
    t.entries[u] = v;
  }
  return t;
}

LookupTable LookupTable::make_recip_sqrt(int64_t scale, uint32_t size,
                                         int32_t log2_spacing) {
  if (scale <= 0 || size < 2 || log2_spacing >= 0 || log2_spacing < -30) {
    throw std::invalid_argument("make_recip_sqrt: bad parameters");
  }
  LookupTable t;
  t.name = "recip_sqrt";
  t.scale = scale;
  double spacing = std::ldexp(1.0, log2_spacing);
  t.lo_raw = 0;
  t.hi_raw = quantize(static_cast<double>(size - 1) * spacing, scale);
  // index = round(key / (spacing * scale)) = round(key * 2^-log2 / scale)
  t.idx_num = int64_t{1} << (-log2_spacing);
  t.idx_den = scale;
  t.entries.resize(size);
  t.entries[0] = 0;
  for (uint32_t i = 1; i < size; ++i) {
    double x = static_cast<double>(i) * spacing;
    t.entries[i] = quantize(1.0 / std::sqrt(x), scale);
  }
  return t;
}

}  // namespace limecert
