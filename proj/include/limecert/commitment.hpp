#pragma once

#include <span>

#include "limecert/bytes.hpp"

namespace limecert {

// Hash commitment com = H(tag || len(msg) || msg || rho) with a 32-byte
// blinding value rho. Binding comes from collision resistance of the hash;
// hiding from the blinding entropy. The tag separates message domains so a
// commitment to one structure can never open as another.
struct Commitment {
  Digest digest{};

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

constexpr size_t kBlindingBytes = 32;

Commitment commit(std::string_view tag, std::span<const uint8_t> msg,
                  std::span<const uint8_t> rho);

bool verify_opening(const Commitment& com, std::string_view tag,
                    std::span<const uint8_t> msg, std::span<const uint8_t> rho);

}  // namespace limecert
