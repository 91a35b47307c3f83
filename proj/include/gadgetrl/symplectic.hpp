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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gadgetrl/bit_vector.hpp"

namespace gadgetrl {

/// A Pauli string over n qubits in binary-symplectic form.
///
/// Qubit q carries the operator X^x[q] Z^z[q], so a position with both bits
/// set stands for XZ (rendered as 'Y'). Under this convention products only
/// pick up real signs, which is all H/CX conjugation of real Paulis needs.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(size_t num_qubits) : xs_(num_qubits), zs_(num_qubits) {
    if (num_qubits == 0) {
      throw std::invalid_argument("PauliString needs at least one qubit");
    }
  }

  /// Parses "IIIXXXX", optionally prefixed with '+' or '-'.
  static PauliString from_text(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    PauliString result(text.size());
    result.sign_ = negative;
    for (size_t q = 0; q < text.size(); q++) {
      switch (text[q]) {
        case 'I':
        case '_':
          break;
        case 'X':
          result.xs_.set(q, true);
          break;
        case 'Z':
          result.zs_.set(q, true);
          break;
        case 'Y':
          result.xs_.set(q, true);
          result.zs_.set(q, true);
          break;
        default:
          throw std::invalid_argument("invalid Pauli character '" + std::string(1, text[q]) +
                                      "' in \"" + std::string(text) + "\"");
      }
    }
    return result;
  }

  static PauliString single_x(size_t num_qubits, size_t q) {
    PauliString p(num_qubits);
    p.xs_.set(q, true);
    return p;
  }
  static PauliString single_z(size_t num_qubits, size_t q) {
    PauliString p(num_qubits);
    p.zs_.set(q, true);
    return p;
  }

  size_t num_qubits() const { return xs_.size(); }
  const BitVector& xs() const { return xs_; }
  const BitVector& zs() const { return zs_; }
  BitVector& xs() { return xs_; }
  BitVector& zs() { return zs_; }
  bool sign() const { return sign_; }
  void set_sign(bool negative) { sign_ = negative; }

  bool x(size_t q) const { return xs_[q]; }
  bool z(size_t q) const { return zs_[q]; }

  bool is_x_type() const { return !zs_.any(); }
  bool is_z_type() const { return !xs_.any(); }

  /// Letters only, no sign.
  std::string to_text() const {
    std::string out(num_qubits(), 'I');
    for (size_t q = 0; q < out.size(); q++) {
      out[q] = "IXZY"[xs_[q] | (zs_[q] << 1)];
    }
    return out;
  }
  std::string to_signed_text() const { return (sign_ ? "-" : "+") + to_text(); }

  bool operator==(const PauliString& other) const = default;

 private:
  BitVector xs_;
  BitVector zs_;
  bool sign_ = false;
};

inline void require_same_size(const PauliString& p, const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw std::invalid_argument("Pauli strings act on different qubit counts (" +
                                std::to_string(p.num_qubits()) + " vs " +
                                std::to_string(q.num_qubits()) + ")");
  }
}

inline size_t weight(const PauliString& p) {
  size_t total = 0;
  auto xw = p.xs().words();
  auto zw = p.zs().words();
  for (size_t w = 0; w < xw.size(); w++) {
    total += std::popcount(xw[w] | zw[w]);
  }
  return total;
}

/// Symplectic inner product test: <p.x, q.z> + <p.z, q.x> == 0 mod 2.
inline bool commutes(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  auto px = p.xs().words();
  auto pz = p.zs().words();
  auto qx = q.xs().words();
  auto qz = q.zs().words();
  uint64_t acc = 0;
  for (size_t w = 0; w < px.size(); w++) {
    acc ^= (px[w] & qz[w]) ^ (pz[w] & qx[w]);
  }
  return (std::popcount(acc) & 1) == 0;
}

/// Product p*q. Moving q's X factors left past p's Z factors contributes
/// (-1)^{|p.z AND q.x|}.
inline PauliString multiply(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  PauliString out = p;
  out.xs() ^= q.xs();
  out.zs() ^= q.zs();
  bool flip = p.zs().and_parity(q.xs());
  out.set_sign(p.sign() ^ q.sign() ^ flip);
  return out;
}

}  // namespace gadgetrl
