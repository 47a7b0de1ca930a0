#pragma once

#include <cstdint>
#include <vector>

#include "limecert/field_element.hpp"
#include "limecert/lookup_table.hpp"

namespace limecert {

// Hash-based PRF over the field: prf_hash(k, i) = SHA-256("xp.prf" || k || i)
// reduced mod p. Both parties derive the same per-query digest stream from
// the combined key k = r_p + r_v.
FieldElement prf_hash(const FieldElement& key, uint64_t index);

std::vector<FieldElement> prf_stream(const FieldElement& key, size_t count);

// Number of usable low bits per digest. Keeping the window well under the
// 255-bit field size makes the extracted bits statistically uniform.
constexpr uint32_t kPrfWindowBits = 128;

inline uint32_t limbs_per_digest(uint32_t bits) {
  return kPrfWindowBits / bits;
}

// Splits each digest's low window into base-2^bits limbs, least significant
// limb first; count limbs total. High window bits beyond the last whole limb
// are discarded. Every limb lies in [0, 2^bits).
std::vector<uint32_t> uniform_samples(const std::vector<FieldElement>& digests,
                                      uint32_t bits, size_t count);

// Digests needed to supply `count` limbs at the given limb width.
size_t digests_needed(size_t count, uint32_t bits);

// Maps uniform limbs through the inverse-CDF table: standard normal raw
// values at the table's scale.
std::vector<int64_t> gaussian_samples(const std::vector<uint32_t>& uniform,
                                      const LookupTable& gauss_inv_cdf);

}  // namespace limecert
