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


#include "gadgetrl/environment.hpp"

#include <gtest/gtest.h>

#include <random>

#include "gadgetrl/code_analysis.hpp"

using namespace gadgetrl;

namespace {

EnvConfig config(uint32_t n, uint32_t k, uint32_t d, std::vector<uint32_t> levels = {0}, uint32_t T = 20) {
  EnvConfig c;
  c.n = n;
  c.k = k;
  c.d = d;
  c.levels = std::move(levels);
  c.max_steps = T;
  return c;
}

}  // namespace

TEST(init_layer, seven_one) {
  auto init = make_init_layer(7, 1);
  EXPECT_EQ(init.logical, (std::vector<uint32_t>{0}));
  EXPECT_EQ(init.bell, (std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {3, 4}, {5, 6}}));
  EXPECT_TRUE(init.hadamard.empty());
  Environment env(config(7, 1, 3));
  EXPECT_EQ(env.tableau().num_rows(), 6u);
  EXPECT_TRUE(env.tableau().rows_commute());
  EXPECT_TRUE(env.tableau().rows_independent());
}

TEST(init_layer, bell_rows) {
  Environment env(config(3, 1, 2));
  std::vector<std::string> rows;
  for (const auto& r : env.tableau().rows()) rows.push_back(r.to_text());
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(rows, (std::vector<std::string>{"IXX", "IZZ"}));
}

TEST(init_layer, no_stabilizers) {
  Environment env(config(2, 2, 2));
  EXPECT_EQ(env.tableau().num_rows(), 0u);
  EXPECT_EQ(env.observation_size(), 0u);
  EXPECT_NEAR(env.sigma(), 4 * 0.1, 1e-15);
}

TEST(init_layer, nine_one) {
  auto init = make_init_layer(9, 1);
  EXPECT_EQ(init.bell.size(), 4u);
  Environment env(config(9, 1, 3));
  EXPECT_EQ(env.tableau().num_rows(), 8u);
  EXPECT_EQ(env.observation_size(), 144u);
}

TEST(init_layer, leftovers_alternate_hadamard) {
  auto eight = make_init_layer(8, 1);
  EXPECT_EQ(eight.bell.size(), 3u);
  EXPECT_EQ(eight.hadamard, (std::vector<uint32_t>{7}));
  auto seven_two = make_init_layer(7, 2);
  EXPECT_EQ(seven_two.logical, (std::vector<uint32_t>{0, 3}));
  EXPECT_EQ(seven_two.bell, (std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {4, 5}}));
  EXPECT_EQ(seven_two.hadamard, (std::vector<uint32_t>{6}));
  auto spread = make_init_layer(9, 3);  // logical 0 3 6; singles none
  EXPECT_EQ(spread.logical, (std::vector<uint32_t>{0, 3, 6}));
  EXPECT_EQ(spread.bell.size(), 3u);
  auto odd = make_init_layer(10, 4);  // logical 0 2 5 7; singles 1, 6 (H), 9 (H)
  EXPECT_EQ(odd.logical, (std::vector<uint32_t>{0, 2, 5, 7}));
  EXPECT_EQ(odd.bell, (std::vector<std::pair<uint32_t, uint32_t>>{{3, 4}, {8, 9}}));
  EXPECT_EQ(odd.hadamard, (std::vector<uint32_t>{1}));
}

TEST(environment, config_validation) {
  EXPECT_THROW(Environment(config(7, 1, 3, {0}, 0)), std::invalid_argument);
  EXPECT_THROW(Environment(config(7, 0, 3)), std::invalid_argument);
  EXPECT_THROW(Environment(config(7, 1, 1)), std::invalid_argument);
  EXPECT_THROW(Environment(config(4, 1, 3, {2})), std::invalid_argument);  // DCX4 does not fit
}

TEST(environment, reset_is_deterministic) {
  Environment a(config(9, 1, 3)), b(config(9, 1, 3));
  EXPECT_EQ(a.tableau().observation(), b.tableau().observation());
  a.step(3);
  a.reset();
  EXPECT_EQ(a.tableau(), b.tableau());
  EXPECT_EQ(a.sigma(), b.sigma());
  EXPECT_EQ(a.steps(), 0u);
}

TEST(environment, rewards_telescope_and_rows_stay_css) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; trial++) {
    uint32_t n = 5 + rng() % 8;
    Environment env(config(n, 1, 3, {0, 1}, 30));
    double sigma0 = env.sigma(), total = 0;
    while (!env.done()) {
      auto r = env.step(rng() % env.num_actions());
      total += r.reward;
      EXPECT_TRUE(env.tableau().rows_pure_type());
      EXPECT_NEAR(env.sigma(), sigma_kl(env.tableau(), env.errors()), 0.0);
    }
    EXPECT_NEAR(total, sigma0 - env.sigma(), 1e-12);
  }
}

TEST(environment, unchanged_sigma_gives_zero_reward) {
  Environment env(config(7, 1, 3));
  // CX on a Bell pair maps XX -> XI·... back into the stabilizer group only
  // when applied twice; the second application restores Sigma exactly.
  auto first = env.step(2);
  auto second = env.step(2);
  EXPECT_NEAR(first.reward + second.reward, 0.0, 1e-15);
  double before = env.sigma();
  Environment copy = env;
  auto r = copy.step(0);
  if (copy.sigma() == before) {
    EXPECT_EQ(r.reward, 0.0);
  }
}

TEST(environment, episode_lifecycle) {
  Environment env(config(7, 1, 3, {0}, 2));
  EXPECT_THROW(env.step(14), std::out_of_range);
  env.step(0);
  auto r = env.step(1);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(env.done());
  EXPECT_THROW(env.step(0), std::logic_error);
}

TEST(environment, known_encoder_reaches_success) {
  Circuit steane = load_circuit(std::string(GADGETRL_DATA_DIR) + "/steane_7_1_3.circuit");
  Environment env(config(7, 1, 3));
  double sigma0 = env.sigma(), total = 0;
  StepResult last;
  for (const auto& a : steane.actions) {
    auto idx = env.actions().find(Gadget{a.level, a.orientation, a.anchor, 7});
    ASSERT_TRUE(idx.has_value());
    last = env.step(*idx);
    total += last.reward;
  }
  EXPECT_TRUE(last.done);
  EXPECT_TRUE(last.success);
  EXPECT_NEAR(total, sigma0, 1e-12);
  EXPECT_TRUE(verify_distance_at_least(env.tableau(), 3));
  EXPECT_EQ(env.export_circuit(), steane);
}

TEST(environment, export_circuit) {
  Environment env(config(9, 1, 3, {0, 1}));
  Circuit fresh = env.export_circuit();
  EXPECT_TRUE(fresh.actions.empty());
  EXPECT_TRUE(fresh.cx.empty());
  EXPECT_EQ(fresh.init.bell.size(), 4u);
  env.step(0);
  env.step(18 + 5);
  Circuit c = env.export_circuit();
  ASSERT_EQ(c.actions.size(), 2u);
  EXPECT_EQ(c.actions[1].level, 1u);
  EXPECT_EQ(c.cx.size(), 3u);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.final_tableau(), env.tableau());
}

TEST(environment, cx_accounting_for_dcx8_circuit) {
  Environment env(config(31, 1, 6, {0, 3}, 10));
  EXPECT_EQ(env.init_layer().bell.size(), 15u);
  const size_t dcx8_block = 62;
  for (uint32_t i = 0; i < 5; i++) env.step(dcx8_block + 2 * (6 * i));
  env.step(0);
  env.step(2);
  Circuit c = env.export_circuit();
  EXPECT_EQ(c.cx.size(), 5u * 32u + 2u);
  EXPECT_EQ(c.total_cx(), 177u);
}

TEST(environment, gadget_penalty) {
  auto cfg = config(9, 1, 3, {0, 1});
  cfg.gadget_penalty = 0.5;
  cfg.gadget_penalty_start = 1;
  Environment with(cfg);
  Environment without(config(9, 1, 3, {0, 1}));
  EXPECT_EQ(with.step(18).reward, without.step(18).reward);  // before threshold
  EXPECT_NEAR(with.step(20).reward, without.step(20).reward - 0.5, 1e-15);
  EXPECT_EQ(with.step(0).reward, without.step(0).reward);  // CX is not penalized
}
