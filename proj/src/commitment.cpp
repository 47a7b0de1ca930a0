#include "limecert/commitment.hpp"

#include <stdexcept>

#include "limecert/sha256.hpp"

namespace limecert {

Commitment commit(std::string_view tag, std::span<const uint8_t> msg,
                  std::span<const uint8_t> rho) {
  if (rho.size() != kBlindingBytes) {
    throw std::invalid_argument("commit: blinding must be 32 bytes");
  }
  ByteWriter w;
  w.str(tag);
  w.bytes(msg);
  w.raw_bytes(rho);
  return Commitment{sha256(w.out())};
}

bool verify_opening(const Commitment& com, std::string_view tag,
                    std::span<const uint8_t> msg,
                    std::span<const uint8_t> rho) {
  if (rho.size() != kBlindingBytes) return false;
  return commit(tag, msg, rho).digest == com.digest;
}

}  // namespace limecert
