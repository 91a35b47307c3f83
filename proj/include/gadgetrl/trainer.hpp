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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gadgetrl/circuit.hpp"
#include "gadgetrl/code_analysis.hpp"
#include "gadgetrl/config.hpp"
#include "gadgetrl/environment.hpp"
#include "gadgetrl/nn.hpp"

namespace gadgetrl {

template <typename Scalar>
struct PolicyValueNets {
  Mlp<Scalar> actor;
  Mlp<Scalar> critic;

  static PolicyValueNets create(size_t observation_size, size_t num_actions, const std::vector<size_t>& hidden,
                                std::mt19937_64& rng) {
    std::vector<size_t> a{observation_size}, c{observation_size};
    a.insert(a.end(), hidden.begin(), hidden.end());
    c.insert(c.end(), hidden.begin(), hidden.end());
    a.push_back(num_actions);
    c.push_back(1);
    // Small actor output keeps the initial policy close to uniform.
    return {Mlp<Scalar>(a, rng, 0.01), Mlp<Scalar>(c, rng, 1.0)};
  }
};

struct EpisodeSummary {
  size_t begin = 0;  ///< first record index in the batch
  size_t length = 0;
  bool success = false;
  double total_reward = 0;
  double initial_sigma = 0;
  double final_sigma = 0;

  /// Cumulative reward over the starting Sigma_KL; 1 on success when the
  /// penalty is off.
  double normalized_return() const { return initial_sigma > 0 ? total_reward / initial_sigma : 1.0; }
};

/// Complete episodes only; records of one episode are contiguous.
struct TrajectoryBatch {
  size_t observation_size = 0;
  std::vector<float> observations;  ///< record-major, observation_size per record
  std::vector<uint32_t> actions;
  std::vector<double> rewards;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<uint8_t> dones;
  std::vector<EpisodeSummary> episodes;
  std::vector<Circuit> successes;

  size_t size() const { return actions.size(); }
};

namespace detail {

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(size_t count, size_t workers, Fn&& fn) {
  workers = std::max<size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (size_t i = 0; i < count; i++) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; w++) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Runs every environment for L steps with the current policy, resetting
/// on done. The trailing unfinished episode of each environment is dropped,
/// so the batch holds at most E*L records. Sampling draws come from `rng`
/// in environment order, so results do not depend on `workers`.
template <typename Scalar>
TrajectoryBatch collect(const PolicyValueNets<Scalar>& nets, std::vector<Environment>& envs, size_t L,
                        std::mt19937_64& rng, bool greedy = false, size_t workers = 1) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  if (envs.empty()) throw std::invalid_argument("collect needs at least one environment");
  const size_t E = envs.size();
  const size_t obs_size = envs[0].observation_size();
  const size_t num_actions = envs[0].num_actions();
  if (nets.actor.input_size() != obs_size || nets.actor.output_size() != num_actions) {
    throw std::invalid_argument("network shape does not match the environment");
  }

  struct Pending {
    std::vector<float> obs;
    std::vector<uint32_t> actions;
    std::vector<double> rewards, log_probs, values;
    std::vector<uint8_t> dones;
    void clear() {
      obs.clear();
      actions.clear();
      rewards.clear();
      log_probs.clear();
      values.clear();
      dones.clear();
    }
  };
  std::vector<Pending> pending(E);
  TrajectoryBatch batch;
  batch.observation_size = obs_size;

  for (auto& env : envs) env.reset();
  std::vector<float> obs_buf(obs_size);
  Matrix x(obs_size, E);
  std::vector<StepResult> results(E);
  std::vector<uint32_t> chosen(E);

  for (size_t step = 0; step < L; step++) {
    for (size_t e = 0; e < E; e++) {
      envs[e].write_observation(std::span<float>(obs_buf));
      for (size_t i = 0; i < obs_size; i++) x(i, e) = static_cast<Scalar>(obs_buf[i]);
    }
    Matrix logits = nets.actor.forward(x);
    Matrix values = nets.critic.forward(x);
    Matrix logp = log_softmax(logits);
    for (size_t e = 0; e < E; e++) {
      uint32_t a = 0;
      if (greedy) {
        Eigen::Index best = 0;
        logp.col(e).maxCoeff(&best);
        a = static_cast<uint32_t>(best);
      } else {
        double u = uniform01(rng), acc = 0;
        a = static_cast<uint32_t>(num_actions - 1);
        for (size_t j = 0; j < num_actions; j++) {
          acc += std::exp(static_cast<double>(logp(j, e)));
          if (u < acc) {
            a = static_cast<uint32_t>(j);
            break;
          }
        }
      }
      chosen[e] = a;
      auto& p = pending[e];
      p.obs.insert(p.obs.end(), x.col(e).data(), x.col(e).data() + obs_size);
      p.actions.push_back(a);
      p.log_probs.push_back(static_cast<double>(logp(a, e)));
      p.values.push_back(static_cast<double>(values(0, e)));
    }
    detail::parallel_for(E, workers, [&](size_t e) { results[e] = envs[e].step(chosen[e]); });
    for (size_t e = 0; e < E; e++) {
      auto& p = pending[e];
      p.rewards.push_back(results[e].reward);
      p.dones.push_back(results[e].done);
      if (!results[e].done) continue;
      EpisodeSummary s;
      s.begin = batch.size();
      s.length = p.actions.size();
      s.success = results[e].success;
      s.total_reward = std::accumulate(p.rewards.begin(), p.rewards.end(), 0.0);
      s.initial_sigma = envs[e].initial_sigma();
      s.final_sigma = envs[e].sigma();
      batch.episodes.push_back(s);
      if (s.success) batch.successes.push_back(envs[e].export_circuit());
      batch.observations.insert(batch.observations.end(), p.obs.begin(), p.obs.end());
      batch.actions.insert(batch.actions.end(), p.actions.begin(), p.actions.end());
      batch.rewards.insert(batch.rewards.end(), p.rewards.begin(), p.rewards.end());
      batch.log_probs.insert(batch.log_probs.end(), p.log_probs.begin(), p.log_probs.end());
      batch.values.insert(batch.values.end(), p.values.begin(), p.values.end());
      batch.dones.insert(batch.dones.end(), p.dones.begin(), p.dones.end());
      p.clear();
      envs[e].reset();
    }
  }
  return batch;
}

/// Suffix maxima of discounted partial sums for one episode:
/// out[t] = max_{j >= t} sum_{t'=t..j} gamma^(t'-t) r[t'].
/// Truncated episodes are treated as terminated (no bootstrap).
inline std::vector<double> max_return_targets(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double next = 0;
  for (size_t t = rewards.size(); t-- > 0;) {
    out[t] = t + 1 == rewards.size() ? rewards[t] : rewards[t] + gamma * std::max(0.0, next);
    next = out[t];
  }
  return out;
}

inline std::vector<double> max_return_targets(const TrajectoryBatch& batch, double gamma) {
  std::vector<double> out(batch.size());
  for (const auto& ep : batch.episodes) {
    auto t = max_return_targets(std::span<const double>(batch.rewards).subspan(ep.begin, ep.length), gamma);
    std::copy(t.begin(), t.end(), out.begin() + static_cast<std::ptrdiff_t>(ep.begin));
  }
  return out;
}

struct PpoHyper {
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
};

struct LossTerms {
  double policy = 0;
  double value = 0;
  double entropy = 0;
  double approx_kl = 0;
  double clip_fraction = 0;

  double total(const PpoHyper& h) const { return policy + h.value_coef * value - h.entropy_coef * entropy; }
};

/// Mean PPO loss over the columns of `obs`; accumulates gradients of
/// policy - entropy_coef*entropy into actor_grads and value_coef*value
/// into critic_grads when they are non-null. value = 0.5*mean((V - R)^2).
template <typename Scalar>
LossTerms ppo_loss(const PolicyValueNets<Scalar>& nets, const typename Mlp<Scalar>::Matrix& obs,
                   std::span<const uint32_t> actions, std::span<const double> old_log_probs,
                   std::span<const double> advantages, std::span<const double> returns, const PpoHyper& h,
                   typename Mlp<Scalar>::Gradients* actor_grads = nullptr,
                   typename Mlp<Scalar>::Gradients* critic_grads = nullptr) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const size_t B = static_cast<size_t>(obs.cols());
  if (actions.size() != B || old_log_probs.size() != B || advantages.size() != B || returns.size() != B) {
    throw std::invalid_argument("ppo_loss inputs have mismatched lengths");
  }
  typename Mlp<Scalar>::Cache actor_cache, critic_cache;
  const bool want_grad = actor_grads || critic_grads;
  Matrix logits = nets.actor.forward(obs, want_grad ? &actor_cache : nullptr);
  Matrix v = nets.critic.forward(obs, want_grad ? &critic_cache : nullptr);
  Matrix logp = log_softmax(logits);
  const size_t A = static_cast<size_t>(logits.rows());
  Matrix g_logits = Matrix::Zero(static_cast<Eigen::Index>(A), static_cast<Eigen::Index>(B));
  Matrix g_v(1, static_cast<Eigen::Index>(B));
  LossTerms out;
  const double inv_b = 1.0 / static_cast<double>(B);
  for (size_t i = 0; i < B; i++) {
    const auto col = static_cast<Eigen::Index>(i);
    const uint32_t a = actions[i];
    const double lp = static_cast<double>(logp(a, col));
    const double ratio = std::exp(lp - old_log_probs[i]);
    const double adv = advantages[i];
    const double clipped = std::clamp(ratio, 1 - h.clip, 1 + h.clip);
    const double s1 = ratio * adv, s2 = clipped * adv;
    out.policy -= std::min(s1, s2) * inv_b;
    out.approx_kl += (old_log_probs[i] - lp) * inv_b;
    if (std::abs(ratio - 1) > h.clip) out.clip_fraction += inv_b;
    // d(-min)/d(logp_a): the unclipped branch carries the gradient.
    const double g_lp = s1 <= s2 ? -ratio * adv * inv_b : 0.0;

    double ent = 0;
    for (size_t j = 0; j < A; j++) {
      double lpj = static_cast<double>(logp(j, col));
      ent -= std::exp(lpj) * lpj;
    }
    out.entropy += ent * inv_b;
    for (size_t j = 0; j < A; j++) {
      const double lpj = static_cast<double>(logp(j, col));
      const double pj = std::exp(lpj);
      double g = g_lp * ((j == a ? 1.0 : 0.0) - pj);
      // dH/dz_j = -p_j (log p_j + H); the loss carries -entropy_coef * H.
      g += h.entropy_coef * inv_b * pj * (lpj + ent);
      g_logits(static_cast<Eigen::Index>(j), col) = static_cast<Scalar>(g);
    }

    const double diff = static_cast<double>(v(0, col)) - returns[i];
    out.value += 0.5 * diff * diff * inv_b;
    g_v(0, col) = static_cast<Scalar>(h.value_coef * diff * inv_b);
  }
  if (actor_grads) nets.actor.backward(actor_cache, g_logits, *actor_grads);
  if (critic_grads) nets.critic.backward(critic_cache, g_v, *critic_grads);
  return out;
}

struct UpdateStats {
  LossTerms loss;  ///< averaged over minibatches
  size_t minibatches = 0;
  bool aborted = false;
  std::string diagnostic;
};

template <typename Scalar>
struct Optimizers {
  RmsProp<Scalar> actor;
  RmsProp<Scalar> critic;

  static Optimizers create(const PolicyValueNets<Scalar>& nets, double lr) {
    return {RmsProp<Scalar>(nets.actor, lr), RmsProp<Scalar>(nets.critic, lr)};
  }
};

struct PpoSettings {
  PpoHyper hyper;
  size_t epochs = 4;
  size_t minibatch = 256;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
};

/// Clipped-surrogate PPO over the batch. A non-finite loss aborts the
/// remaining updates of this call and is reported in the diagnostic.
template <typename Scalar>
UpdateStats ppo_update(PolicyValueNets<Scalar>& nets, Optimizers<Scalar>& opt, const TrajectoryBatch& batch,
                       std::span<const double> targets, const PpoSettings& s, std::mt19937_64& rng) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  UpdateStats stats;
  const size_t N = batch.size();
  if (targets.size() != N) throw std::invalid_argument("targets are not aligned with the batch");
  if (N == 0) return stats;

  std::vector<double> adv(N);
  for (size_t i = 0; i < N; i++) adv[i] = targets[i] - batch.values[i];
  if (s.normalize_advantages && N > 1) {
    double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(N);
    double var = 0;
    for (double a : adv) var += (a - mean) * (a - mean);
    double sd = std::sqrt(var / static_cast<double>(N));
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }

  std::vector<size_t> order(N);
  const size_t obs_size = batch.observation_size;
  for (size_t epoch = 0; epoch < s.epochs; epoch++) {
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = N; i > 1; i--) {
      size_t j = static_cast<size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    for (size_t start = 0; start < N; start += s.minibatch) {
      const size_t B = std::min(s.minibatch, N - start);
      Matrix obs(obs_size, B);
      std::vector<uint32_t> acts(B);
      std::vector<double> old_lp(B), mb_adv(B), mb_ret(B);
      for (size_t b = 0; b < B; b++) {
        size_t r = order[start + b];
        for (size_t i = 0; i < obs_size; i++) {
          obs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) =
              static_cast<Scalar>(batch.observations[r * obs_size + i]);
        }
        acts[b] = batch.actions[r];
        old_lp[b] = batch.log_probs[r];
        mb_adv[b] = adv[r];
        mb_ret[b] = targets[r];
      }
      auto ga = nets.actor.zero_gradients();
      auto gc = nets.critic.zero_gradients();
      LossTerms l = ppo_loss<Scalar>(nets, obs, acts, old_lp, mb_adv, mb_ret, s.hyper, &ga, &gc);
      const double total = l.total(s.hyper);
      if (!std::isfinite(total) || !std::isfinite(gradient_norm<Scalar>(ga)) ||
          !std::isfinite(gradient_norm<Scalar>(gc))) {
        stats.aborted = true;
        stats.diagnostic = "non-finite loss in PPO epoch " + std::to_string(epoch) + " (policy=" +
                           std::to_string(l.policy) + ", value=" + std::to_string(l.value) +
                           ", entropy=" + std::to_string(l.entropy) + ")";
        return stats;
      }
      if (s.max_grad_norm > 0) {
        for (auto* g : {&ga, &gc}) {
          double norm = gradient_norm<Scalar>(*g);
          if (norm > s.max_grad_norm) scale_gradients<Scalar>(*g, static_cast<Scalar>(s.max_grad_norm / norm));
        }
      }
      opt.actor.step(nets.actor, ga);
      opt.critic.step(nets.critic, gc);
      stats.loss.policy += l.policy;
      stats.loss.value += l.value;
      stats.loss.entropy += l.entropy;
      stats.loss.approx_kl += l.approx_kl;
      stats.loss.clip_fraction += l.clip_fraction;
      stats.minibatches++;
    }
  }
  const double m = static_cast<double>(stats.minibatches);
  stats.loss.policy /= m;
  stats.loss.value /= m;
  stats.loss.entropy /= m;
  stats.loss.approx_kl /= m;
  stats.loss.clip_fraction /= m;
  return stats;
}

struct CurriculumStage {
  uint32_t d = 3;
  uint32_t max_epochs = 0;  ///< 0 = whatever budget remains
};

/// Stages max(3, d-2) .. d; every stage but the last is capped at
/// stage_epochs.
struct CurriculumSchedule {
  std::vector<CurriculumStage> stages;

  static CurriculumSchedule for_target(uint32_t d, uint32_t stage_epochs) {
    CurriculumSchedule s;
    uint32_t first = std::max<uint32_t>(3, d >= 2 ? d - 2 : 0);
    for (uint32_t x = std::min(first, d); x <= d; x++) {
      s.stages.push_back({x, x == d ? 0u : stage_epochs});
    }
    s.validate();
    return s;
  }

  void validate() const {
    if (stages.empty()) throw std::invalid_argument("curriculum has no stages");
    if (stages.front().d < 2) throw std::invalid_argument("first curriculum stage needs d >= 2");
    for (size_t i = 1; i < stages.size(); i++) {
      if (stages[i].d <= stages[i - 1].d) {
        throw std::invalid_argument("curriculum distances must be strictly increasing");
      }
    }
  }
};

struct EpochLog {
  uint32_t epoch = 0;
  uint32_t stage_d = 0;
  double mean_normalized_return = 0;
  double success_rate = 0;
  double mean_episode_length = 0;
  size_t episodes = 0;
  LossTerms loss;
  bool update_aborted = false;
};

inline std::string epoch_log_csv_header() {
  return "epoch,stage_d,mean_normalized_return,success_rate,mean_episode_length,episodes,"
         "policy_loss,value_loss,entropy,approx_kl,clip_fraction\n";
}

inline std::string to_csv_row(const EpochLog& e) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%u,%u,%.6f,%.6f,%.4f,%zu,%.6g,%.6g,%.6g,%.6g,%.6g\n", e.epoch, e.stage_d,
                e.mean_normalized_return, e.success_rate, e.mean_episode_length, e.episodes, e.loss.policy,
                e.loss.value, e.loss.entropy, e.loss.approx_kl, e.loss.clip_fraction);
  return buf;
}

struct TrainResult {
  PolicyValueNets<float> nets;
  std::vector<Circuit> discovered;  ///< target-distance successes, one per canonical form
  std::vector<EpochLog> log;
  std::optional<uint32_t> first_success_epoch;  ///< 1-based epoch of the first target-d success
  uint32_t epochs_run = 0;
  std::string stop_reason;

  bool success() const { return !discovered.empty(); }
};

inline PpoSettings ppo_settings(const TrainConfig& cfg) {
  PpoSettings s;
  s.hyper = {cfg.clip, cfg.entropy_coef, cfg.value_coef};
  s.epochs = cfg.ppo_epochs;
  s.minibatch = cfg.minibatch;
  s.max_grad_norm = cfg.max_grad_norm;
  s.normalize_advantages = cfg.normalize_advantages;
  return s;
}

/// Trains stage by stage with parameters carried across stages; the error
/// set (and so the reward) is rebuilt for each stage distance.
inline TrainResult run_curriculum(const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch = {},
                                  const PolicyValueNets<float>* initial = nullptr) {
  cfg.validate();
  auto schedule = CurriculumSchedule::for_target(cfg.d, cfg.stage_epochs);
  std::mt19937_64 rng(cfg.seed);
  auto actions = std::make_shared<const ActionTable>(ActionTable::build(cfg.n, cfg.levels));
  if (actions->size() == 0) throw ConfigError("levels", "no enabled gadget level fits n=" + std::to_string(cfg.n));

  auto first_errors = std::make_shared<const ErrorSet>(ErrorSet::enumerate(cfg.n, schedule.stages[0].d, cfg.error_rate));
  std::vector<Environment> envs;
  envs.reserve(cfg.num_envs);
  for (uint32_t e = 0; e < cfg.num_envs; e++) {
    envs.emplace_back(cfg.env_config(schedule.stages[0].d), actions, first_errors);
  }

  TrainResult result;
  result.nets = initial ? *initial
                        : PolicyValueNets<float>::create(envs[0].observation_size(), actions->size(), cfg.hidden, rng);
  if (result.nets.actor.input_size() != envs[0].observation_size() ||
      result.nets.actor.output_size() != actions->size()) {
    throw ConfigError("checkpoint", "network shape does not match n/k/levels");
  }
  auto opt = Optimizers<float>::create(result.nets, cfg.learning_rate);
  const PpoSettings settings = ppo_settings(cfg);
  std::set<BinaryMatrix> seen;

  uint32_t epoch = 0;
  for (size_t si = 0; si < schedule.stages.size() && epoch < cfg.epochs; si++) {
    const auto& stage = schedule.stages[si];
    const bool final_stage = si + 1 == schedule.stages.size();
    if (si > 0) {
      auto errors = std::make_shared<const ErrorSet>(ErrorSet::enumerate(cfg.n, stage.d, cfg.error_rate));
      for (auto& env : envs) env.set_errors(errors, stage.d);
    }
    double best_return = -std::numeric_limits<double>::infinity();
    uint32_t since_progress = 0;
    uint32_t stage_epoch = 0;
    while (epoch < cfg.epochs && (stage.max_epochs == 0 || stage_epoch < stage.max_epochs)) {
      epoch++;
      stage_epoch++;
      TrajectoryBatch batch = collect(result.nets, envs, cfg.effective_rollout_length(), rng, false, cfg.workers);
      auto targets = max_return_targets(batch, cfg.gamma);
      UpdateStats upd = ppo_update(result.nets, opt, batch, targets, settings, rng);

      EpochLog row;
      row.epoch = epoch;
      row.stage_d = stage.d;
      row.episodes = batch.episodes.size();
      size_t successes = 0;
      for (const auto& ep : batch.episodes) {
        row.mean_normalized_return += ep.normalized_return();
        row.mean_episode_length += static_cast<double>(ep.length);
        successes += ep.success;
      }
      if (row.episodes) {
        row.mean_normalized_return /= static_cast<double>(row.episodes);
        row.mean_episode_length /= static_cast<double>(row.episodes);
        row.success_rate = static_cast<double>(successes) / static_cast<double>(row.episodes);
      }
      row.loss = upd.loss;
      row.update_aborted = upd.aborted;
      result.log.push_back(row);
      if (on_epoch) on_epoch(row);

      if (final_stage) {
        for (const auto& c : batch.successes) {
          if (seen.insert(c.final_tableau().canonical_form()).second) result.discovered.push_back(c);
        }
        if (!batch.successes.empty() && !result.first_success_epoch) result.first_success_epoch = epoch;
      }
      if (successes > 0 || row.mean_normalized_return > best_return + 1e-9) {
        since_progress = 0;
      } else {
        since_progress++;
      }
      best_return = std::max(best_return, row.mean_normalized_return);

      if (final_stage && cfg.stop_on_success && !result.discovered.empty()) {
        result.stop_reason = "success";
        break;
      }
      if (!final_stage && row.episodes && row.success_rate >= cfg.advance_success_rate) {
        break;
      }
      if (cfg.patience > 0 && since_progress >= cfg.patience) {
        result.stop_reason = "patience exhausted at d=" + std::to_string(stage.d);
        break;
      }
    }
    if (!result.stop_reason.empty()) break;
  }
  result.epochs_run = epoch;
  if (result.stop_reason.empty()) {
    result.stop_reason = result.discovered.empty() ? "epoch budget exhausted" : "epoch budget reached";
  }
  return result;
}

/// Greedy rollout of one episode; returns the final environment state.
template <typename Scalar>
Environment greedy_episode(const PolicyValueNets<Scalar>& nets, const EnvConfig& cfg) {
  std::vector<Environment> envs{Environment(cfg)};
  envs[0].reset();
  std::vector<float> buf(envs[0].observation_size());
  typename Mlp<Scalar>::Matrix x(buf.size(), 1);
  while (!envs[0].done()) {
    envs[0].write_observation(std::span<float>(buf));
    for (size_t i = 0; i < buf.size(); i++) x(static_cast<Eigen::Index>(i), 0) = static_cast<Scalar>(buf[i]);
    Eigen::Index best = 0;
    nets.actor.forward(x).col(0).maxCoeff(&best);
    envs[0].step(static_cast<size_t>(best));
  }
  return std::move(envs[0]);
}

// Checkpoint layout: magic, u32 version, u64 config hash, then for each of
// actor and critic: u32 layer count, u64 sizes, float32 parameters.
inline constexpr char kCheckpointMagic[8] = {'G', 'R', 'L', 'C', 'K', 'P', 'T', '\0'};
inline constexpr uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("checkpoint truncated");
  return v;
}

inline void write_net(std::ostream& out, const Mlp<float>& net) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(net.sizes().size()));
  for (size_t s : net.sizes()) write_pod<uint64_t>(out, s);
  for (size_t i = 0; i < net.num_parameters(); i++) write_pod<float>(out, net.parameter(i));
}

inline Mlp<float> read_net(std::istream& in) {
  uint32_t count = read_pod<uint32_t>(in);
  if (count < 2 || count > 64) throw std::runtime_error("checkpoint has a corrupt layer count");
  std::vector<size_t> sizes;
  for (uint32_t i = 0; i < count; i++) sizes.push_back(read_pod<uint64_t>(in));
  std::mt19937_64 rng(0);
  Mlp<float> net(sizes, rng);
  for (size_t i = 0; i < net.num_parameters(); i++) net.parameter(i) = read_pod<float>(in);
  return net;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const PolicyValueNets<float>& nets, uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::write_pod(out, kCheckpointVersion);
  detail::write_pod(out, config_hash);
  detail::write_net(out, nets.actor);
  detail::write_net(out, nets.critic);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

/// Loads a checkpoint; throws if the magic, version or config hash differ.
inline PolicyValueNets<float> load_checkpoint(const std::string& path, std::optional<uint64_t> expected_hash = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[sizeof kCheckpointMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw std::runtime_error(path + ": not a checkpoint file");
  }
  auto version = detail::read_pod<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  auto hash = detail::read_pod<uint64_t>(in);
  if (expected_hash && hash != *expected_hash) {
    throw std::runtime_error(path + ": checkpoint was written for a different n/k/levels/network config");
  }
  PolicyValueNets<float> nets{detail::read_net(in), detail::read_net(in)};
  return nets;
}

}  // namespace gadgetrl
