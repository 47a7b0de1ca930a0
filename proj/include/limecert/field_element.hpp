#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "limecert/bytes.hpp"

namespace limecert {

// Element of the prime field mod p = 2^255 - 19, stored as four 64-bit
// little-endian limbs in canonical reduced form. The protocol only needs
// addition mod p, comparison, and reduction of 32 hash bytes, so the type
// stays deliberately small.
struct FieldElement {
  std::array<uint64_t, 4> limb{0, 0, 0, 0};

  static const FieldElement& modulus();

  static FieldElement from_u64(uint64_t v) {
    FieldElement e;
    e.limb[0] = v;
    return e;
  }

  // interprets 32 bytes as a little-endian integer and reduces mod p
  static FieldElement reduce_from_bytes(const Digest& d);

  // loads 32 bytes as little-endian limbs with no reduction; canonicity is
  // checked downstream so wire round-trips stay exact
  static FieldElement from_bytes_raw(const Digest& d);

  static FieldElement from_hex(const std::string& s);

  FieldElement add(const FieldElement& other) const;

  // to little-endian bytes (canonical form)
  Digest to_bytes() const;
  std::string to_hex() const;

  bool is_canonical() const;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

}  // namespace limecert
