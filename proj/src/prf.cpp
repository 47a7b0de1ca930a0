#include "limecert/prf.hpp"

#include <stdexcept>

#include "limecert/sha256.hpp"

namespace limecert {

FieldElement prf_hash(const FieldElement& key, uint64_t index) {
  ByteWriter w;
  w.str("xp.prf");
  Digest kb = key.to_bytes();
  w.raw_bytes(kb);
  w.u64le(index);
  return FieldElement::reduce_from_bytes(sha256(w.out()));
}

std::vector<FieldElement> prf_stream(const FieldElement& key, size_t count) {
  std::vector<FieldElement> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(prf_hash(key, i));
  return out;
}

size_t digests_needed(size_t count, uint32_t bits) {
  if (bits == 0 || bits > 32 || kPrfWindowBits % 8 != 0) {
    throw std::invalid_argument("digests_needed: unsupported limb width");
  }
  size_t per = limbs_per_digest(bits);
  if (per == 0) throw std::invalid_argument("digests_needed: limb width too large");
  return (count + per - 1) / per;
}

std::vector<uint32_t> uniform_samples(const std::vector<FieldElement>& digests,
                                       uint32_t bits, size_t count) {
  if (bits == 0 || bits > 32) {
    throw std::invalid_argument("uniform_samples: unsupported limb width");
  }
  size_t per = limbs_per_digest(bits);
  if (digests.size() < digests_needed(count, bits)) {
    throw std::invalid_argument("uniform_samples: not enough digests");
  }
  std::vector<uint32_t> limbs;
  limbs.reserve(count);
  uint32_t mask = (bits == 32) ? 0xffffffffu : ((1u << bits) - 1);
  for (size_t di = 0; limbs.size() < count; ++di) {
    // low 128 bits of the field element, consumed LSB-first
    unsigned __int128 window =
        (static_cast<unsigned __int128>(digests[di].limb[1]) << 64) |
        digests[di].limb[0];
    for (size_t j = 0; j < per && limbs.size() < count; ++j) {
      limbs.push_back(static_cast<uint32_t>(window & mask));
      window >>= bits;
    }
  }
  return limbs;
}

std::vector<int64_t> gaussian_samples(const std::vector<uint32_t>& uniform,
                                      const LookupTable& gauss_inv_cdf) {
  std::vector<int64_t> out;
  out.reserve(uniform.size());
  for (uint32_t u : uniform) out.push_back(gauss_inv_cdf.at(u));
  return out;
}

}  // namespace limecert
