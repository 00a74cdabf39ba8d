#include "linord/bitvector.hpp"

#include <algorithm>
#include <bit>

namespace linord {

namespace {

constexpr BitVector::Word low_mask(std::size_t len) {
  return len >= BitVector::kWordBits ? ~BitVector::Word{0}
                                     : (BitVector::Word{1} << len) - 1;
}

}  // namespace

BitVector::BitVector(std::size_t size, bool value)
    : size_(size), words_((size + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
  clear_tail();
}

void BitVector::clear_tail() {
  if (size_ % kWordBits != 0 && !words_.empty()) {
    words_.back() &= low_mask(size_ % kWordBits);
  }
}

void BitVector::fill(bool value) {
  std::fill(words_.begin(), words_.end(), value ? ~Word{0} : Word{0});
  clear_tail();
}

void BitVector::flip() {
  for (auto& w : words_) w = ~w;
  clear_tail();
}

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t BitVector::count_range(std::size_t begin, std::size_t end) const {
  std::size_t total = 0;
  while (begin < end) {
    const std::size_t len = std::min(kWordBits, end - begin);
    total += static_cast<std::size_t>(std::popcount(extract(begin, len)));
    begin += len;
  }
  return total;
}

bool BitVector::any_range(std::size_t begin, std::size_t end) const {
  while (begin < end) {
    const std::size_t len = std::min(kWordBits, end - begin);
    if (extract(begin, len) != 0) return true;
    begin += len;
  }
  return false;
}

bool BitVector::all_range(std::size_t begin, std::size_t end) const {
  while (begin < end) {
    const std::size_t len = std::min(kWordBits, end - begin);
    if (extract(begin, len) != low_mask(len)) return false;
    begin += len;
  }
  return true;
}

BitVector::Word BitVector::extract(std::size_t offset, std::size_t len) const {
  if (len == 0) return 0;
  const std::size_t word = offset / kWordBits;
  const std::size_t shift = offset % kWordBits;
  Word bits = words_[word] >> shift;
  if (shift != 0 && shift + len > kWordBits) {
    bits |= words_[word + 1] << (kWordBits - shift);
  }
  return bits & low_mask(len);
}

void BitVector::deposit(std::size_t offset, std::size_t len, Word bits) {
  if (len == 0) return;
  bits &= low_mask(len);
  const std::size_t word = offset / kWordBits;
  const std::size_t shift = offset % kWordBits;
  const Word mask = low_mask(len);
  words_[word] = (words_[word] & ~(mask << shift)) | (bits << shift);
  if (shift != 0 && shift + len > kWordBits) {
    const std::size_t spill = kWordBits - shift;
    words_[word + 1] = (words_[word + 1] & ~(mask >> spill)) | (bits >> spill);
  }
}

void BitVector::or_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                         std::size_t len) {
  while (len > 0) {
    const std::size_t chunk = std::min(kWordBits, len);
    const Word s = src.extract(src_offset, chunk);
    if (s != 0) deposit(dst_offset, chunk, extract(dst_offset, chunk) | s);
    dst_offset += chunk;
    src_offset += chunk;
    len -= chunk;
  }
}

void BitVector::and_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                          std::size_t len) {
  while (len > 0) {
    const std::size_t chunk = std::min(kWordBits, len);
    const Word s = src.extract(src_offset, chunk);
    if (s != low_mask(chunk)) deposit(dst_offset, chunk, extract(dst_offset, chunk) & s);
    dst_offset += chunk;
    src_offset += chunk;
    len -= chunk;
  }
}

void BitVector::copy_range(std::size_t dst_offset, const BitVector& src, std::size_t src_offset,
                           std::size_t len) {
  while (len > 0) {
    const std::size_t chunk = std::min(kWordBits, len);
    deposit(dst_offset, chunk, src.extract(src_offset, chunk));
    dst_offset += chunk;
    src_offset += chunk;
    len -= chunk;
  }
}

std::size_t BitVector::find_next(std::size_t from) const {
  if (from >= size_) return size_;
  std::size_t word = from / kWordBits;
  Word w = words_[word] & (~Word{0} << (from % kWordBits));
  while (true) {
    if (w != 0) {
      return std::min(size_, word * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
    }
    if (++word >= words_.size()) return size_;
    w = words_[word];
  }
}

}  // namespace linord
