#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace limecert {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

// Length-prefixed, little-endian byte encoding used for every hashed or
// committed structure. Fixed layout means the encoding is canonical: equal
// structures produce equal bytes on every platform.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }

  void u32le(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  void u64le(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  void i64le(int64_t v) { u64le(static_cast<uint64_t>(v)); }

  void raw_bytes(std::span<const uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }

  // length-prefixed payloads
  void bytes(std::span<const uint8_t> b) {
    u64le(b.size());
    raw_bytes(b);
  }

  void str(std::string_view s) {
    u64le(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  void i64_vec(std::span<const int64_t> v) {
    u64le(v.size());
    for (int64_t x : v) i64le(x);
  }

  const Bytes& out() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Sequential reader over a ByteWriter encoding; throws std::out_of_range on
// truncated input so malformed payloads surface as typed errors.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }

  uint32_t u32le() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  uint64_t u64le() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  int64_t i64le() { return static_cast<int64_t>(u64le()); }

  Bytes bytes() {
    uint64_t len = u64le();
    need(len);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }

  std::string str() {
    Bytes b = bytes();
    return std::string(b.begin(), b.end());
  }

  std::vector<int64_t> i64_vec() {
    uint64_t len = u64le();
    std::vector<int64_t> out;
    out.reserve(len);
    for (uint64_t i = 0; i < len; ++i) out.push_back(i64le());
    return out;
  }

  Digest digest() {
    need(32);
    Digest d;
    std::copy(data_.begin() + pos_, data_.begin() + pos_ + 32, d.begin());
    pos_ += 32;
    return d;
  }

  bool done() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(uint64_t n) const {
    if (pos_ + n > data_.size()) {
      throw std::out_of_range("byte decoding: truncated input");
    }
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

inline std::string hex_encode(std::span<const uint8_t> b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (uint8_t c : b) {
    s.push_back(digits[c >> 4]);
    s.push_back(digits[c & 0xf]);
  }
  return s;
}

inline Bytes hex_decode(std::string_view s) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (s.size() % 2 != 0) throw std::invalid_argument("hex_decode: odd length");
  Bytes out;
  out.reserve(s.size() / 2);
  for (size_t i = 0; i < s.size(); i += 2) {
    int hi = nib(s[i]);
    int lo = nib(s[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("hex_decode: bad digit");
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return out;
}

inline std::string hex_encode(const Digest& d) {
  return hex_encode(std::span<const uint8_t>(d.data(), d.size()));
}

inline Digest digest_from_hex(std::string_view s) {
  Bytes b = hex_decode(s);
  if (b.size() != 32) throw std::invalid_argument("digest_from_hex: need 32 bytes");
  Digest d;
  std::copy(b.begin(), b.end(), d.begin());
  return d;
}

}  // namespace limecert
