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

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadgetrl/circuit.hpp"
#include "gadgetrl/code_analysis.hpp"
#include "gadgetrl/gadgets.hpp"
#include "gadgetrl/tableau.hpp"

namespace gadgetrl {

struct EnvConfig {
  uint32_t n = 7;
  uint32_t k = 1;
  uint32_t d = 3;
  std::vector<uint32_t> levels{0};
  uint32_t max_steps = 20;  ///< episode length T
  double error_rate = 0.1;  ///< lambda_mu = error_rate^weight
  ObservationMode observation = ObservationMode::kRaw;
  double gadget_penalty = 0;         ///< subtracted per gadget (level >= 1) action; 0 = off
  uint32_t gadget_penalty_start = 0;  ///< first step index the penalty applies to

  void validate() const {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k > n) throw std::invalid_argument("k must not exceed n");
    if (d < 2) throw std::invalid_argument("d must be >= 2");
    if (d > n) throw std::invalid_argument("d must not exceed n");
    if (levels.empty()) throw std::invalid_argument("at least one gadget level must be enabled");
    if (!(error_rate > 0)) throw std::invalid_argument("error_rate must be positive");
    if (gadget_penalty < 0) throw std::invalid_argument("gadget_penalty must be non-negative");
  }
};

/// Logical qubits at floor(i*n/k); remaining qubits are scanned in index
/// order and paired with their ring neighbour into Bell pairs when both are
/// free; leftovers alternate between H and nothing.
inline InitLayer make_init_layer(uint32_t n, uint32_t k) {
  if (k > n) throw std::invalid_argument("k exceeds n");
  InitLayer init;
  std::vector<bool> used(n, false);
  for (uint32_t i = 0; i < k; i++) {
    uint32_t q = static_cast<uint32_t>((uint64_t{i} * n) / k);
    init.logical.push_back(q);
    used[q] = true;
  }
  std::vector<uint32_t> singles;
  for (uint32_t q = 0; q < n; q++) {
    if (used[q]) continue;
    uint32_t next = (q + 1) % n;
    if (next != q && !used[next]) {
      init.bell.emplace_back(q, next);
      used[q] = used[next] = true;
    } else {
      singles.push_back(q);
      used[q] = true;
    }
  }
  for (size_t i = 0; i < singles.size(); i++) {
    if (i % 2 == 0) init.hadamard.push_back(singles[i]);
  }
  return init;
}

struct StepResult {
  double reward = 0;
  bool done = false;
  bool success = false;
};

/// One episode of circuit construction. Immutable data (action table, error
/// set) is shared; the tableau is owned.
class Environment {
 public:
  Environment(EnvConfig cfg, std::shared_ptr<const ActionTable> actions,
              std::shared_ptr<const ErrorSet> errors)
      : cfg_(std::move(cfg)), actions_(std::move(actions)), errors_(std::move(errors)) {
    cfg_.validate();
    if (actions_->num_qubits() != cfg_.n || errors_->num_qubits() != cfg_.n) {
      throw std::invalid_argument("action table / error set built for a different n");
    }
    if (actions_->size() == 0) {
      throw std::invalid_argument("no gadget level fits n=" + std::to_string(cfg_.n));
    }
    init_ = make_init_layer(cfg_.n, cfg_.k);
    reset();
  }

  explicit Environment(const EnvConfig& cfg)
      : Environment(cfg, std::make_shared<const ActionTable>(ActionTable::build(cfg.n, cfg.levels)),
                    std::make_shared<const ErrorSet>(ErrorSet::enumerate(cfg.n, cfg.d, cfg.error_rate))) {}

  const EnvConfig& config() const { return cfg_; }
  const ActionTable& actions() const { return *actions_; }
  const ErrorSet& errors() const { return *errors_; }
  const InitLayer& init_layer() const { return init_; }
  size_t num_actions() const { return actions_->size(); }
  size_t observation_size() const { return tableau_.observation_size(); }

  void reset() {
    Circuit c;
    c.n = cfg_.n;
    c.k = cfg_.k;
    c.d = cfg_.d;
    c.init = init_;
    tableau_ = c.initial_tableau();
    log_.clear();
    step_ = 0;
    sigma_ = sigma_kl(tableau_, *errors_);
    initial_sigma_ = sigma_;
    success_ = sigma_ == 0;
    done_ = success_;
  }

  /// Replaces the error set (curriculum stage change) and resets.
  void set_errors(std::shared_ptr<const ErrorSet> errors, uint32_t d) {
    if (errors->num_qubits() != cfg_.n) throw std::invalid_argument("error set built for a different n");
    errors_ = std::move(errors);
    cfg_.d = d;
    reset();
  }

  StepResult step(size_t action) {
    if (done_) throw std::logic_error("step() called on a finished episode; call reset()");
    if (action >= actions_->size()) {
      throw std::out_of_range("action " + std::to_string(action) + " outside [0, " +
                              std::to_string(actions_->size()) + ")");
    }
    const auto& a = (*actions_)[action];
    apply_gates(tableau_, a.gates);
    log_.push_back(action);
    double previous = sigma_;
    sigma_ = sigma_kl(tableau_, *errors_);
    StepResult r;
    r.reward = -(sigma_ - previous);
    if (cfg_.gadget_penalty > 0 && a.gadget.level >= 1 && step_ >= cfg_.gadget_penalty_start) {
      r.reward -= cfg_.gadget_penalty;
    }
    step_++;
    success_ = sigma_ == 0;
    done_ = success_ || step_ >= cfg_.max_steps;
    r.done = done_;
    r.success = success_;
    return r;
  }

  template <typename T>
  void write_observation(std::span<T> out) const {
    tableau_.write_observation(out, cfg_.observation);
  }

  const StabilizerTableau& tableau() const { return tableau_; }
  double sigma() const { return sigma_; }
  double initial_sigma() const { return initial_sigma_; }
  uint32_t steps() const { return step_; }
  bool done() const { return done_; }
  bool success() const { return success_; }
  std::span<const size_t> action_log() const { return log_; }

  Circuit export_circuit() const {
    Circuit c;
    c.n = cfg_.n;
    c.k = cfg_.k;
    c.d = cfg_.d;
    c.init = init_;
    for (size_t idx : log_) {
      const auto& a = (*actions_)[idx];
      c.actions.push_back({a.gadget.level, a.gadget.anchor, a.gadget.orientation});
      c.cx.insert(c.cx.end(), a.gates.begin(), a.gates.end());
    }
    return c;
  }

 private:
  EnvConfig cfg_;
  std::shared_ptr<const ActionTable> actions_;
  std::shared_ptr<const ErrorSet> errors_;
  InitLayer init_;
  StabilizerTableau tableau_;
  std::vector<size_t> log_;
  uint32_t step_ = 0;
  double sigma_ = 0;
  double initial_sigma_ = 0;
  bool done_ = false;
  bool success_ = false;
};

}  // namespace gadgetrl
