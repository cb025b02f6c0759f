#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pvd {

// Fixed-length bit vector over GF(2).
//
// Bit 0 is the leftmost position of the string form, so lexicographic order
// on str() coincides with operator< and, for n <= 64, with index(). Length
// is fixed at construction; binary operators require equal lengths.
class BitString {
 public:
  BitString() = default;  // length 0, placeholder only

  explicit BitString(std::size_t n) : n_(n), w_(words(n), 0) {}

  static BitString zeros(std::size_t n) { return BitString(n); }

  static BitString ones(std::size_t n) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b.set_bit(i, 1);
    return b;
  }

  // Big-endian value: bit 0 receives the most significant of the n bits.
  static BitString from_index(std::uint64_t v, std::size_t n) {
    if (n > 64) throw std::invalid_argument("from_index: n > 64");
    if (n < 64 && (v >> n) != 0)
      throw std::invalid_argument("from_index: value does not fit");
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i)
      b.set_bit(i, static_cast<int>((v >> (n - 1 - i)) & 1u));
    return b;
  }

  static BitString from_string(std::string_view s) {
    BitString b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1')
        throw std::invalid_argument("from_string: not a 0/1 string");
      b.set_bit(i, s[i] - '0');
    }
    return b;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  int bit(std::size_t i) const {
    check_index(i);
    return static_cast<int>((w_[i >> 6] >> shift(i)) & 1u);
  }

  void set_bit(std::size_t i, int v) {
    check_index(i);
    const std::uint64_t mask = std::uint64_t{1} << shift(i);
    if (v)
      w_[i >> 6] |= mask;
    else
      w_[i >> 6] &= ~mask;
  }

  BitString operator^(const BitString& o) const {
    check_same(o);
    BitString r(n_);
    for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] ^ o.w_[k];
    return r;
  }

  // GF(2) inner product.
  int dot(const BitString& o) const {
    check_same(o);
    int parity = 0;
    for (std::size_t k = 0; k < w_.size(); ++k)
      parity ^= std::popcount(w_[k] & o.w_[k]) & 1;
    return parity;
  }

  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

  // Lexicographic; shorter strings order before longer ones on ties.
  std::strong_ordering operator<=>(const BitString& o) const {
    const std::size_t k = std::min(w_.size(), o.w_.size());
    for (std::size_t i = 0; i < k; ++i)
      if (w_[i] != o.w_[i]) return w_[i] <=> o.w_[i];
    return n_ <=> o.n_;
  }

  // Numeric value of the big-endian bit pattern. Requires n <= 64.
  std::uint64_t index() const {
    if (n_ > 64) throw std::logic_error("index: n > 64");
    if (n_ == 0) return 0;
    return w_[0] >> (64 - n_);
  }

  std::string str() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) s[i] = char('0' + bit(i));
    return s;
  }

  // Packed big-endian: bit i lands in byte i/8 at bit position 7 - i%8.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((n_ + 7) / 8, 0);
    for (std::size_t i = 0; i < n_; ++i)
      if (bit(i)) out[i >> 3] |= std::uint8_t(1u << (7 - (i & 7)));
    return out;
  }

  static BitString from_bytes(const std::vector<std::uint8_t>& bytes,
                              std::size_t n) {
    if (bytes.size() < (n + 7) / 8)
      throw std::invalid_argument("from_bytes: too few bytes");
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i)
      b.set_bit(i, (bytes[i >> 3] >> (7 - (i & 7))) & 1u);
    return b;
  }

 private:
  static std::size_t words(std::size_t n) { return (n + 63) / 64; }
  static unsigned shift(std::size_t i) { return 63u - (i & 63u); }

  void check_index(std::size_t i) const {
    if (i >= n_) throw std::out_of_range("BitString: bit index out of range");
  }
  void check_same(const BitString& o) const {
    if (n_ != o.n_) throw std::invalid_argument("BitString: length mismatch");
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;  // bit i at word i/64, bit 63 - i%64
};

}  // namespace pvd
