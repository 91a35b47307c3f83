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

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadgetrl/bit_vector.hpp"
#include "gadgetrl/symplectic.hpp"

namespace gadgetrl {

/// Rows of equal-length bit vectors over GF(2).
using BinaryMatrix = std::vector<BitVector>;

/// In-place reduced row echelon form. Zero rows are dropped; returns the rank.
inline size_t gf2_rref(BinaryMatrix& rows) {
  if (rows.empty()) {
    return 0;
  }
  size_t num_cols = rows.front().size();
  size_t rank = 0;
  for (size_t col = 0; col < num_cols && rank < rows.size(); col++) {
    size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][col]) {
      pivot++;
    }
    if (pivot == rows.size()) {
      continue;
    }
    std::swap(rows[rank], rows[pivot]);
    for (size_t r = 0; r < rows.size(); r++) {
      if (r != rank && rows[r][col]) {
        rows[r] ^= rows[rank];
      }
    }
    rank++;
  }
  rows.resize(rank);
  return rank;
}

/// Renders a matrix as lines of '0'/'1'.
inline std::string to_text(const BinaryMatrix& m) {
  std::string out;
  for (const auto& row : m) {
    for (size_t c = 0; c < row.size(); c++) {
      out.push_back(row[c] ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

enum class ObservationMode { kRaw, kCanonical };

/// Generators of an [[n,k]] stabilizer group, evolved by Clifford conjugation.
class StabilizerTableau {
 public:
  StabilizerTableau() = default;
  StabilizerTableau(size_t n, size_t k) : n_(n), k_(k) {
    if (k > n) {
      throw std::invalid_argument("k exceeds n");
    }
  }

  /// Takes n from the rows and k = n - rows.size().
  static StabilizerTableau from_rows(std::vector<PauliString> rows) {
    if (rows.empty()) {
      throw std::invalid_argument("cannot infer qubit count from an empty row list");
    }
    size_t n = rows.front().num_qubits();
    if (rows.size() > n) {
      throw std::invalid_argument("more generators than qubits");
    }
    StabilizerTableau t(n, n - rows.size());
    for (auto& r : rows) {
      t.add_row(std::move(r));
    }
    return t;
  }
  static StabilizerTableau from_text(const std::vector<std::string>& rows) {
    std::vector<PauliString> parsed;
    for (const auto& r : rows) {
      parsed.push_back(PauliString::from_text(r));
    }
    return from_rows(std::move(parsed));
  }

  void add_row(PauliString row) {
    if (row.num_qubits() != n_) {
      throw std::invalid_argument("row qubit count does not match tableau");
    }
    rows_.push_back(std::move(row));
  }

  size_t num_qubits() const { return n_; }
  size_t num_logical() const { return k_; }
  size_t num_rows() const { return rows_.size(); }
  const std::vector<PauliString>& rows() const { return rows_; }
  const PauliString& row(size_t r) const { return rows_[r]; }

  void apply_h(size_t q) {
    check_qubit(q);
    for (auto& row : rows_) {
      bool x = row.x(q);
      bool z = row.z(q);
      row.xs().set(q, z);
      row.zs().set(q, x);
      if (x && z) {
        row.set_sign(!row.sign());
      }
    }
  }

  /// Heisenberg action of CX: X_c -> X_c X_t, Z_t -> Z_c Z_t.
  void apply_cx(size_t control, size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
      throw std::invalid_argument("CX control and target coincide (qubit " +
                                  std::to_string(control) + ")");
    }
    for (auto& row : rows_) {
      if (row.x(control)) {
        row.xs().flip(target);
      }
      if (row.z(target)) {
        row.zs().flip(control);
      }
    }
  }

  /// Rows as length-2n vectors: X columns 0..n-1 then Z columns n..2n-1.
  BinaryMatrix symplectic_matrix() const {
    BinaryMatrix m;
    m.reserve(rows_.size());
    for (const auto& row : rows_) {
      BitVector v(2 * n_);
      for (size_t q = 0; q < n_; q++) {
        v.set(q, row.x(q));
        v.set(n_ + q, row.z(q));
      }
      m.push_back(std::move(v));
    }
    return m;
  }

  /// Unique GF(2) RREF of the generator matrix, signs discarded.
  BinaryMatrix canonical_form() const {
    BinaryMatrix m = symplectic_matrix();
    gf2_rref(m);
    return m;
  }

  size_t observation_size() const { return 2 * n_ * (n_ - k_); }

  /// Row-major 0/1 flattening, X block then Z block per row. Canonical mode
  /// pads the echelon form with zero rows back to n-k rows.
  template <typename T>
  void write_observation(std::span<T> out, ObservationMode mode = ObservationMode::kRaw) const {
    if (out.size() != observation_size()) {
      throw std::invalid_argument("observation buffer has wrong size");
    }
    std::fill(out.begin(), out.end(), T(0));
    BinaryMatrix m = mode == ObservationMode::kRaw ? symplectic_matrix() : canonical_form();
    size_t width = 2 * n_;
    for (size_t r = 0; r < m.size() && r < n_ - k_; r++) {
      for (size_t c = 0; c < width; c++) {
        if (m[r][c]) {
          out[r * width + c] = T(1);
        }
      }
    }
  }
  std::vector<uint8_t> observation(ObservationMode mode = ObservationMode::kRaw) const {
    std::vector<uint8_t> out(observation_size());
    write_observation<uint8_t>(out, mode);
    return out;
  }

  bool rows_pure_type() const {
    for (const auto& row : rows_) {
      if (!row.is_x_type() && !row.is_z_type()) {
        return false;
      }
    }
    return true;
  }

  bool rows_commute() const {
    for (size_t a = 0; a < rows_.size(); a++) {
      for (size_t b = a + 1; b < rows_.size(); b++) {
        if (!commutes(rows_[a], rows_[b])) {
          return false;
        }
      }
    }
    return true;
  }

  bool rows_independent() const { return symplectic_rank() == rows_.size(); }

  size_t symplectic_rank() const {
    BinaryMatrix m = symplectic_matrix();
    return gf2_rref(m);
  }

  bool operator==(const StabilizerTableau& other) const = default;

 private:
  void check_qubit(size_t q) const {
    if (q >= n_) {
      throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                              std::to_string(n_) + " qubits");
    }
  }

  size_t n_ = 0;
  size_t k_ = 0;
  std::vector<PauliString> rows_;
};

}  // namespace gadgetrl
