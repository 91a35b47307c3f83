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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadgetrl/environment.hpp"
#include "gadgetrl/gadgets.hpp"

namespace gadgetrl {

/// Invalid configuration value; field() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Every training knob. Text form is one `key = value` per line.
struct TrainConfig {
  // code search target
  uint32_t n = 7;
  uint32_t k = 1;
  uint32_t d = 3;
  std::vector<uint32_t> levels{0};
  uint32_t max_steps = 20;
  double error_rate = 0.1;
  ObservationMode observation = ObservationMode::kRaw;
  double gadget_penalty = 0;
  uint32_t gadget_penalty_start = 0;

  // rollouts and schedule
  uint64_t seed = 1;
  uint32_t num_envs = 32;
  uint32_t rollout_length = 0;  ///< steps per environment per epoch; 0 = max_steps
  uint32_t epochs = 2000;
  uint32_t stage_epochs = 500;        ///< cap for every stage but the last
  double advance_success_rate = 0.2;  ///< leave a non-final stage once an epoch reaches this
  uint32_t patience = 500;            ///< epochs without success or improvement before stopping
  bool stop_on_success = true;

  // networks and PPO
  std::vector<size_t> hidden{256, 256};
  double learning_rate = 3e-4;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double gamma = 1.0;
  uint32_t minibatch = 256;
  uint32_t ppo_epochs = 4;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;

  uint32_t workers = 1;

  EnvConfig env_config(uint32_t stage_d) const {
    EnvConfig e;
    e.n = n;
    e.k = k;
    e.d = stage_d;
    e.levels = levels;
    e.max_steps = max_steps;
    e.error_rate = error_rate;
    e.observation = observation;
    e.gadget_penalty = gadget_penalty;
    e.gadget_penalty_start = gadget_penalty_start;
    return e;
  }

  uint32_t effective_rollout_length() const { return rollout_length ? rollout_length : max_steps; }

  void validate() const {
    try {
      env_config(d).validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("env", e.what());
    }
    if (d < 3) throw ConfigError("d", "training targets need d >= 3");
    for (uint32_t l : levels) {
      if (l > kMaxGadgetLevel) throw ConfigError("levels", "unsupported level " + std::to_string(l));
    }
    if (num_envs == 0) throw ConfigError("num_envs", "must be >= 1");
    if (epochs == 0) throw ConfigError("epochs", "must be >= 1");
    if (stage_epochs == 0) throw ConfigError("stage_epochs", "must be >= 1");
    if (hidden.empty()) throw ConfigError("hidden", "need at least one hidden layer");
    for (size_t h : hidden) {
      if (h == 0) throw ConfigError("hidden", "layer widths must be positive");
    }
    if (!(learning_rate > 0)) throw ConfigError("learning_rate", "must be positive");
    if (!(clip > 0 && clip < 1)) throw ConfigError("clip", "must lie in (0, 1)");
    if (entropy_coef < 0) throw ConfigError("entropy_coef", "must be non-negative");
    if (value_coef < 0) throw ConfigError("value_coef", "must be non-negative");
    if (!(gamma > 0 && gamma <= 1)) throw ConfigError("gamma", "must lie in (0, 1]");
    if (minibatch == 0) throw ConfigError("minibatch", "must be >= 1");
    if (ppo_epochs == 0) throw ConfigError("ppo_epochs", "must be >= 1");
    if (max_grad_norm < 0) throw ConfigError("max_grad_norm", "must be non-negative (0 disables)");
    if (workers == 0) throw ConfigError("workers", "must be >= 1");
  }

  /// Sets one key from its text form.
  void set(const std::string& key, const std::string& value);

  std::map<std::string, std::string> to_map() const;

  std::string to_text() const {
    std::string out;
    for (const auto& [key, value] : to_map()) out += key + " = " + value + "\n";
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      size_t used = 0;
      out = static_cast<T>(std::stod(value, &used));
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + value + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    }
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); i++) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Level list such as "cx,dcx,dcx4" or "0,1,2".
inline std::vector<uint32_t> parse_levels(const std::string& value) {
  std::vector<uint32_t> out;
  for (const auto& item : detail::split_list(value)) {
    try {
      out.push_back(parse_level(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("levels", e.what());
    }
  }
  if (out.empty()) throw ConfigError("levels", "empty level list");
  return out;
}

inline std::string levels_to_text(const std::vector<uint32_t>& levels) {
  std::string out;
  for (size_t i = 0; i < levels.size(); i++) {
    if (i) out += ",";
    out += level_name(levels[i]);
  }
  return out;
}

inline void TrainConfig::set(const std::string& key, const std::string& raw) {
  using detail::parse_bool;
  using detail::parse_number;
  const std::string value = detail::trim(raw);
  if (key == "n") n = parse_number<uint32_t>(key, value);
  else if (key == "k") k = parse_number<uint32_t>(key, value);
  else if (key == "d") d = parse_number<uint32_t>(key, value);
  else if (key == "levels") levels = parse_levels(value);
  else if (key == "max_steps") max_steps = parse_number<uint32_t>(key, value);
  else if (key == "error_rate") error_rate = parse_number<double>(key, value);
  else if (key == "observation") {
    if (value == "raw") observation = ObservationMode::kRaw;
    else if (value == "canonical") observation = ObservationMode::kCanonical;
    else throw ConfigError(key, "expected raw or canonical, got '" + value + "'");
  }
  else if (key == "gadget_penalty") gadget_penalty = parse_number<double>(key, value);
  else if (key == "gadget_penalty_start") gadget_penalty_start = parse_number<uint32_t>(key, value);
  else if (key == "seed") seed = parse_number<uint64_t>(key, value);
  else if (key == "num_envs") num_envs = parse_number<uint32_t>(key, value);
  else if (key == "rollout_length") rollout_length = parse_number<uint32_t>(key, value);
  else if (key == "epochs") epochs = parse_number<uint32_t>(key, value);
  else if (key == "stage_epochs") stage_epochs = parse_number<uint32_t>(key, value);
  else if (key == "advance_success_rate") advance_success_rate = parse_number<double>(key, value);
  else if (key == "patience") patience = parse_number<uint32_t>(key, value);
  else if (key == "stop_on_success") stop_on_success = parse_bool(key, value);
  else if (key == "hidden") {
    hidden.clear();
    for (const auto& item : detail::split_list(value)) hidden.push_back(parse_number<size_t>(key, item));
  }
  else if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
  else if (key == "clip") clip = parse_number<double>(key, value);
  else if (key == "entropy_coef") entropy_coef = parse_number<double>(key, value);
  else if (key == "value_coef") value_coef = parse_number<double>(key, value);
  else if (key == "gamma") gamma = parse_number<double>(key, value);
  else if (key == "minibatch") minibatch = parse_number<uint32_t>(key, value);
  else if (key == "ppo_epochs") ppo_epochs = parse_number<uint32_t>(key, value);
  else if (key == "max_grad_norm") max_grad_norm = parse_number<double>(key, value);
  else if (key == "normalize_advantages") normalize_advantages = parse_bool(key, value);
  else if (key == "workers") workers = parse_number<uint32_t>(key, value);
  else throw ConfigError(key, "unknown configuration key");
}

inline std::map<std::string, std::string> TrainConfig::to_map() const {
  using detail::format_double;
  return {
      {"n", std::to_string(n)},
      {"k", std::to_string(k)},
      {"d", std::to_string(d)},
      {"levels", levels_to_text(levels)},
      {"max_steps", std::to_string(max_steps)},
      {"error_rate", format_double(error_rate)},
      {"observation", observation == ObservationMode::kRaw ? "raw" : "canonical"},
      {"gadget_penalty", format_double(gadget_penalty)},
      {"gadget_penalty_start", std::to_string(gadget_penalty_start)},
      {"seed", std::to_string(seed)},
      {"num_envs", std::to_string(num_envs)},
      {"rollout_length", std::to_string(rollout_length)},
      {"epochs", std::to_string(epochs)},
      {"stage_epochs", std::to_string(stage_epochs)},
      {"advance_success_rate", format_double(advance_success_rate)},
      {"patience", std::to_string(patience)},
      {"stop_on_success", stop_on_success ? "true" : "false"},
      {"hidden", detail::join(hidden)},
      {"learning_rate", format_double(learning_rate)},
      {"clip", format_double(clip)},
      {"entropy_coef", format_double(entropy_coef)},
      {"value_coef", format_double(value_coef)},
      {"gamma", format_double(gamma)},
      {"minibatch", std::to_string(minibatch)},
      {"ppo_epochs", std::to_string(ppo_epochs)},
      {"max_grad_norm", format_double(max_grad_norm)},
      {"normalize_advantages", normalize_advantages ? "true" : "false"},
      {"workers", std::to_string(workers)},
  };
}

/// Parses `key = value` lines; '#' starts a comment.
inline TrainConfig parse_config(const std::string& text, TrainConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    base.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

inline TrainConfig load_config(const std::string& path, TrainConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// FNV-1a over a byte string.
inline uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of the fields that fix network shapes and input encoding.
inline uint64_t network_config_hash(const TrainConfig& c) {
  std::string key = "n=" + std::to_string(c.n) + ";k=" + std::to_string(c.k) + ";levels=" +
                    levels_to_text(c.levels) + ";hidden=" + detail::join(c.hidden) +
                    ";observation=" + (c.observation == ObservationMode::kRaw ? "raw" : "canonical");
  return fnv1a(key);
}

}  // namespace gadgetrl
