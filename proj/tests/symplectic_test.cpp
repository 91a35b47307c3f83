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

#include "gadgetrl/symplectic.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dense_oracle.hpp"

using namespace gadgetrl;

TEST(bit_vector, basic_ops) {
  BitVector a(130), b(130);
  a.set(0, true);
  a.set(129, true);
  b.set(129, true);
  b.set(64, true);
  EXPECT_EQ(a.popcount(), 2u);
  a ^= b;
  EXPECT_TRUE(a[0]);
  EXPECT_TRUE(a[64]);
  EXPECT_FALSE(a[129]);
  EXPECT_EQ(a.first_set(), 0u);
  EXPECT_THROW(a ^= BitVector(3), std::invalid_argument);
}

TEST(pauli_string, text_round_trip) {
  auto p = PauliString::from_text("-XIZY_");
  EXPECT_TRUE(p.sign());
  EXPECT_EQ(p.to_text(), "XIZYI");
  EXPECT_EQ(p.to_signed_text(), "-XIZYI");
  EXPECT_EQ(weight(p), 3u);
  EXPECT_THROW(PauliString::from_text("XQ"), std::invalid_argument);
}

TEST(pauli_string, pure_types) {
  EXPECT_TRUE(PauliString::from_text("XXI").is_x_type());
  EXPECT_TRUE(PauliString::from_text("IZZ").is_z_type());
  EXPECT_FALSE(PauliString::from_text("XZI").is_x_type());
  EXPECT_FALSE(PauliString::from_text("XZI").is_z_type());
}

TEST(pauli_string, examples) {
  EXPECT_FALSE(commutes(PauliString::from_text("X"), PauliString::from_text("Z")));
  EXPECT_TRUE(commutes(PauliString::from_text("XX"), PauliString::from_text("ZZ")));
  auto xz = multiply(PauliString::from_text("X"), PauliString::from_text("Z"));
  EXPECT_EQ(xz.to_signed_text(), "+Y");
  auto zx = multiply(PauliString::from_text("Z"), PauliString::from_text("X"));
  EXPECT_EQ(zx.to_signed_text(), "-Y");
  EXPECT_THROW(multiply(PauliString(2), PauliString(3)), std::invalid_argument);
}

TEST(pauli_string, product_and_commutation_match_dense_matrices) {
  std::mt19937_64 rng(11);
  for (size_t n = 1; n <= 6; n++) {
    for (int trial = 0; trial < 40; trial++) {
      auto p = oracle::random_pauli(n, rng);
      auto q = oracle::random_pauli(n, rng);
      oracle::Dense mp = oracle::pauli(p), mq = oracle::pauli(q);
      EXPECT_LT((mp * mq - oracle::pauli(multiply(p, q))).norm(), 1e-9) << p.to_signed_text() << " " << q.to_signed_text();
      bool dense_commute = (mp * mq - mq * mp).norm() < 1e-9;
      EXPECT_EQ(commutes(p, q), dense_commute);
    }
  }
}

TEST(pauli_string, multiply_is_associative_and_self_inverse_up_to_sign) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; trial++) {
    size_t n = 1 + rng() % 100;
    auto a = oracle::random_pauli(n, rng), b = oracle::random_pauli(n, rng), c = oracle::random_pauli(n, rng);
    EXPECT_EQ(multiply(multiply(a, b), c), multiply(a, multiply(b, c)));
    auto sq = multiply(a, a);
    EXPECT_EQ(weight(sq), 0u);
  }
}
