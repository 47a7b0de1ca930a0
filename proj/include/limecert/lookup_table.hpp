#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limecert/fixed_point.hpp"

namespace limecert {

// Quantized function tables shared by prover and verifier. Tables are
// generated from config parameters at startup (never shipped as blobs);
// generation uses the deterministic math kernel, so both parties hold
// bit-identical entries.
struct LookupTable {
  std::string name;        // "exp" | "gauss_inv_cdf" | "recip_sqrt"
  int64_t scale = 1;       // value scale of entries
  int64_t lo_raw = 0;      // key domain lower bound, raw at `scale`
  int64_t hi_raw = 0;      // key domain upper bound, raw at `scale`
  int64_t idx_num = 1;     // index = round((key - lo) * idx_num / idx_den)
  int64_t idx_den = 1;
  std::vector<int64_t> entries;

  // nearest-grid-point lookup; keys outside [lo, hi] clamp to the edge
  int64_t lookup_key(int64_t key_raw) const {
    if (key_raw < lo_raw) key_raw = lo_raw;
    if (key_raw > hi_raw) key_raw = hi_raw;
    int64_t idx = round_div_half_away(
        static_cast<int128>(key_raw - lo_raw) * idx_num, idx_den);
    if (idx < 0) idx = 0;
    if (idx >= static_cast<int64_t>(entries.size())) {
      idx = static_cast<int64_t>(entries.size()) - 1;
    }
    return entries[static_cast<size_t>(idx)];
  }

  // direct index access (gauss_inv_cdf is indexed by sample limb)
  int64_t at(size_t idx) const;

  // exp on [lo, 0], `size` entries, clamp-to-edge outside
  static LookupTable make_exp(int64_t scale, int64_t lo_raw, uint32_t size);

  // standard normal inverse CDF at midpoints (u + 0.5) / 2^bits,
  // 2^bits entries, values clamped to [-clamp, +clamp]
  static LookupTable make_gauss_inv_cdf(uint32_t bits, int64_t scale,
                                        int64_t clamp_raw);

  // 1/sqrt(x) on a grid with spacing 2^log2_spacing; entry 0 is 0 so a
  // zero-norm vector normalizes to zero instead of faulting
  static LookupTable make_recip_sqrt(int64_t scale, uint32_t size,
                                     int32_t log2_spacing);

  friend bool operator==(const LookupTable&, const LookupTable&) = default;
};

}  // namespace limecert
