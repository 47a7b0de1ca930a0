#pragma once

#include <cstdint>
#include <span>

#include "limecert/bytes.hpp"

namespace limecert {

// Streaming SHA-256 (FIPS 180-4). Self-contained so hashing behaves
// identically everywhere the toolkit runs.
class Sha256 {
 public:
  Sha256() { reset(); }

  void reset();
  void update(std::span<const uint8_t> data);
  Digest finish();

 private:
  void process_block(const uint8_t* block);

  uint32_t state_[8];
  uint64_t total_len_ = 0;
  uint8_t buf_[64];
  size_t buf_len_ = 0;
};

Digest sha256(std::span<const uint8_t> data);

}  // namespace limecert
