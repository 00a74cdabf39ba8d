#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace linord {

// Fixed-size bit vector with word-level range operations. Bit i lives in
// word i / 64 at position i % 64. Bits past size() are kept zero.
class BitVector {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool test(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }
  void set(std::size_t i) { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }
  void assign(std::size_t i, bool value) { value ? set(i) : reset(i); }

  void fill(bool value);
  void flip();

  std::size_t count() const;
  std::size_t count_range(std::size_t begin, std::size_t end) const;
  bool any_range(std::size_t begin, std::size_t end) const;
  bool all_range(std::size_t begin, std::size_t end) const;

  // Reads `len` (<= 64) bits starting at `offset` into the low bits of a word.
  Word extract(std::size_t offset, std::size_t len) const;
  // Overwrites `len` (<= 64) bits starting at `offset` with the low bits of `bits`.
  void deposit(std::size_t offset, std::size_t len, Word bits);

  // dst[dst_offset .. +len) op= src[src_offset .. +len)
  void or_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                std::size_t len);
  void and_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                 std::size_t len);
  void copy_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                  std::size_t len);

  // Index of the first set bit at or after `from`, or size() if none.
  std::size_t find_next(std::size_t from) const;

  std::span<const Word> words() const { return words_; }

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

}  // namespace linord
