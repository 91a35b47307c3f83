// Copyright 2026 The gadgetrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace gadgetrl {

/// Fixed-length bit vector packed into 64-bit words.
///
/// Bits past `size()` in the last word are kept at zero so that word-wise
/// popcount, equality and hashing never need masking.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t num_bits) : size_(num_bits), words_(word_count(num_bits), 0) {}

  static constexpr size_t word_count(size_t num_bits) { return (num_bits + 63) / 64; }

  size_t size() const { return size_; }
  size_t num_words() const { return words_.size(); }
  std::span<uint64_t> words() { return words_; }
  std::span<const uint64_t> words() const { return words_; }

  bool operator[](size_t k) const { return (words_[k >> 6] >> (k & 63)) & 1; }
  void set(size_t k, bool value) {
    uint64_t mask = uint64_t{1} << (k & 63);
    if (value) {
      words_[k >> 6] |= mask;
    } else {
      words_[k >> 6] &= ~mask;
    }
  }
  void flip(size_t k) { words_[k >> 6] ^= uint64_t{1} << (k & 63); }

  BitVector& operator^=(const BitVector& other) {
    check_same_size(other);
    for (size_t w = 0; w < words_.size(); w++) {
      words_[w] ^= other.words_[w];
    }
    return *this;
  }

  size_t popcount() const {
    size_t total = 0;
    for (uint64_t w : words_) {
      total += std::popcount(w);
    }
    return total;
  }

  bool any() const {
    for (uint64_t w : words_) {
      if (w) {
        return true;
      }
    }
    return false;
  }

  /// Parity of |this AND other|.
  bool and_parity(const BitVector& other) const {
    check_same_size(other);
    uint64_t acc = 0;
    for (size_t w = 0; w < words_.size(); w++) {
      acc ^= words_[w] & other.words_[w];
    }
    return std::popcount(acc) & 1;
  }

  /// Index of the lowest set bit, or size() when empty.
  size_t first_set() const {
    for (size_t w = 0; w < words_.size(); w++) {
      if (words_[w]) {
        return w * 64 + std::countr_zero(words_[w]);
      }
    }
    return size_;
  }

  bool operator==(const BitVector& other) const = default;
  auto operator<=>(const BitVector& other) const = default;

 private:
  void check_same_size(const BitVector& other) const {
    if (other.size_ != size_) {
      throw std::invalid_argument("BitVector size mismatch");
    }
  }

  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace gadgetrl
