#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvd/bitstring.hpp"

namespace pvd {

using Bytes = std::vector<std::uint8_t>;

// Little-endian writer for the length-prefixed wire format: every variable
// sized field is written as [u32 byte count][raw bytes]. Bit strings carry an
// extra u32 bit count so lengths that are not byte multiples round-trip.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(std::uint8_t(v >> (8 * i)));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(std::uint8_t(v >> (8 * i)));
  }

  void block(const Bytes& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
  }

  void block(const std::string& s) { block(Bytes(s.begin(), s.end())); }

  void bits(const BitString& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    block(b.to_bytes());
  }

  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const Bytes& b) : buf_(b) {}

  std::uint8_t u8() { return need(1), buf_[pos_++]; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(buf_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf_[pos_++]) << (8 * i);
    return v;
  }

  Bytes block() {
    const std::uint32_t len = u32();
    need(len);
    Bytes out(buf_.begin() + pos_, buf_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }

  std::string block_str() {
    Bytes b = block();
    return std::string(b.begin(), b.end());
  }

  BitString bits() {
    const std::uint32_t n = u32();
    return BitString::from_bytes(block(), n);
  }

  bool done() const { return pos_ == buf_.size(); }

  void expect_done() const {
    if (!done()) throw std::runtime_error("parse: trailing bytes");
  }

 private:
  void need(std::size_t k) const {
    if (buf_.size() - pos_ < k) throw std::runtime_error("parse: truncated input");
  }

  const Bytes& buf_;
  std::size_t pos_ = 0;
};

inline std::string to_hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(2 * b.size());
  for (auto c : b) {
    s.push_back(digits[c >> 4]);
    s.push_back(digits[c & 15]);
  }
  return s;
}

inline Bytes from_hex(const std::string& s) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("from_hex: bad digit");
  };
  if (s.size() % 2) throw std::invalid_argument("from_hex: odd length");
  Bytes out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::uint8_t(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
  return out;
}

}  // namespace pvd
