#include "limecert/field_element.hpp"

#include <stdexcept>

namespace limecert {

namespace {

// p = 2^255 - 19
constexpr std::array<uint64_t, 4> kModulus = {
    0xffffffffffffffedULL, 0xffffffffffffffffULL, 0xffffffffffffffffULL,
    0x7fffffffffffffffULL};

// returns carry
uint64_t add4(std::array<uint64_t, 4>& a, const std::array<uint64_t, 4>& b) {
  unsigned __int128 carry = 0;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 s = carry + a[i];
    s += b[i];
    a[i] = static_cast<uint64_t>(s);
    carry = s >> 64;
  }
  return static_cast<uint64_t>(carry);
}

// returns borrow
uint64_t sub4(std::array<uint64_t, 4>& a, const std::array<uint64_t, 4>& b) {
  unsigned __int128 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 d = static_cast<unsigned __int128>(a[i]) - b[i] - borrow;
    a[i] = static_cast<uint64_t>(d);
    borrow = (d >> 64) & 1;
  }
  return static_cast<uint64_t>(borrow);
}

bool geq4(const std::array<uint64_t, 4>& a, const std::array<uint64_t, 4>& b) {
  for (int i = 3; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

}  // namespace

const FieldElement& FieldElement::modulus() {
  static const FieldElement p{kModulus};
  return p;
}

FieldElement FieldElement::reduce_from_bytes(const Digest& d) {
  FieldElement e;
  for (int i = 0; i < 4; ++i) {
    uint64_t v = 0;
    for (int j = 7; j >= 0; --j) {
      v = (v << 8) | d[i * 8 + j];
    }
    e.limb[i] = v;
  }
  // a 256-bit value is below 2p + 38, so two conditional subtractions reduce it
  if (geq4(e.limb, kModulus)) sub4(e.limb, kModulus);
  if (geq4(e.limb, kModulus)) sub4(e.limb, kModulus);
  return e;
}

FieldElement FieldElement::from_bytes_raw(const Digest& d) {
  FieldElement e;
  for (int i = 0; i < 4; ++i) {
    uint64_t v = 0;
    for (int j = 7; j >= 0; --j) {
      v = (v << 8) | d[i * 8 + j];
    }
    e.limb[i] = v;
  }
  return e;
}

FieldElement FieldElement::add(const FieldElement& other) const {
  FieldElement r = *this;
  uint64_t carry = add4(r.limb, other.limb);
  // both inputs < p < 2^255, so the sum fits in 256 bits with no carry;
  // a single conditional subtraction restores canonical form
  if (carry != 0) throw std::logic_error("FieldElement::add: non-canonical input");
  if (geq4(r.limb, kModulus)) sub4(r.limb, kModulus);
  return r;
}

Digest FieldElement::to_bytes() const {
  Digest d{};
  for (int i = 0; i < 4; ++i) {
    uint64_t v = limb[i];
    for (int j = 0; j < 8; ++j) {
      d[i * 8 + j] = static_cast<uint8_t>(v);
      v >>= 8;
    }
  }
  return d;
}

std::string FieldElement::to_hex() const { return hex_encode(to_bytes()); }

FieldElement FieldElement::from_hex(const std::string& s) {
  FieldElement e;
  Digest d = digest_from_hex(s);
  for (int i = 0; i < 4; ++i) {
    uint64_t v = 0;
    for (int j = 7; j >= 0; --j) {
      v = (v << 8) | d[i * 8 + j];
    }
    e.limb[i] = v;
  }
  if (!e.is_canonical()) throw std::invalid_argument("FieldElement::from_hex: not reduced");
  return e;
}

bool FieldElement::is_canonical() const { return !geq4(limb, kModulus); }

}  // namespace limecert
