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

// Dense 2^n x 2^n matrix models of Paulis, gates and code projectors, used
// as independent oracles for the bit-level implementations. Qubit 0 is the
// most significant tensor factor.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "gadgetrl/symplectic.hpp"
#include "gadgetrl/tableau.hpp"

namespace oracle {

using Dense = Eigen::MatrixXcd;

inline Dense kron(const Dense& a, const Dense& b) {
  Dense out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); i++) {
    for (Eigen::Index j = 0; j < a.cols(); j++) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Dense single(char c) {
  Dense m(2, 2);
  Dense x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  switch (c) {
    case 'X': return x;
    case 'Z': return z;
    case 'Y': return x * z;  // the XZ convention
    default: return Dense::Identity(2, 2);
  }
}

inline Dense pauli(const gadgetrl::PauliString& p) {
  Dense out = Dense::Identity(1, 1);
  std::string text = p.to_text();
  for (char c : text) out = kron(out, single(c));
  return p.sign() ? Dense(-out) : out;
}

/// |b> -> |b'> where b' flips the target bit when the control bit is set.
inline Dense cx(size_t n, size_t control, size_t target) {
  const size_t dim = size_t{1} << n;
  Dense u = Dense::Zero(dim, dim);
  for (size_t b = 0; b < dim; b++) {
    size_t cbit = (b >> (n - 1 - control)) & 1;
    size_t out = cbit ? b ^ (size_t{1} << (n - 1 - target)) : b;
    u(out, b) = 1;
  }
  return u;
}

inline Dense h(size_t n, size_t q) {
  Dense hm(2, 2);
  const double s = 1 / std::sqrt(2.0);
  hm << s, s, s, -s;
  Dense out = Dense::Identity(1, 1);
  for (size_t i = 0; i < n; i++) out = kron(out, i == q ? hm : Dense::Identity(2, 2));
  return out;
}

/// Projector onto the joint +1 eigenspace of the rows.
inline Dense code_projector(const gadgetrl::StabilizerTableau& t) {
  const Eigen::Index dim = Eigen::Index{1} << t.num_qubits();
  Dense p = Dense::Identity(dim, dim);
  for (const auto& row : t.rows()) p = p * (Dense::Identity(dim, dim) + pauli(row)) / 2.0;
  return p;
}

/// Detectable iff P E P is a multiple of P.
inline bool detectable(const gadgetrl::StabilizerTableau& t, const gadgetrl::PauliString& e) {
  Dense p = code_projector(t);
  Dense pep = p * pauli(e) * p;
  std::complex<double> c = (pep.cwiseProduct(p.conjugate())).sum() / p.squaredNorm();
  return (pep - c * p).norm() < 1e-9;
}

inline gadgetrl::PauliString random_pauli(size_t n, std::mt19937_64& rng, bool signed_ = true) {
  gadgetrl::PauliString p(n);
  for (size_t q = 0; q < n; q++) {
    p.xs().set(q, rng() & 1);
    p.zs().set(q, rng() & 1);
  }
  if (signed_) p.set_sign(rng() & 1);
  return p;
}

// Random CSS tableau: X rows and Z rows drawn so that every X row is
// orthogonal to every Z row.
inline gadgetrl::StabilizerTableau random_css(size_t n, std::mt19937_64& rng) {
  for (;;) {
    size_t rx = rng() % n, rz = rng() % (n - rx + 1);
    if (rx + rz == 0) continue;
    std::vector<gadgetrl::PauliString> rows;
    for (size_t i = 0; i < rx; i++) {
      gadgetrl::PauliString p(n);
      for (size_t q = 0; q < n; q++) p.xs().set(q, rng() & 1);
      rows.push_back(p);
    }
    bool ok = true;
    for (size_t i = 0; i < rz && ok; i++) {
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; attempt++) {
        gadgetrl::PauliString p(n);
        for (size_t q = 0; q < n; q++) p.zs().set(q, rng() & 1);
        bool commute_all = true;
        for (size_t j = 0; j < rx; j++) commute_all &= gadgetrl::commutes(p, rows[j]);
        if (commute_all) {
          rows.push_back(p);
          placed = true;
        }
      }
      ok = placed;
    }
    if (!ok) continue;
    auto t = gadgetrl::StabilizerTableau::from_rows(rows);
    if (t.rows_independent() && t.rows_pure_type()) return t;
  }
}

}  // namespace oracle
