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


// gadgetrl command-line tool: training, verification, gadget inspection,
// dataset preprocessing and reports.
//
// Exit codes: 0 success, 1 usage or input error, 2 no discovery (or a
// failed check), 3 internal invariant violation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gadgetrl/code_analysis.hpp"
#include "gadgetrl/config.hpp"
#include "gadgetrl/environment.hpp"
#include "gadgetrl/pipeline.hpp"
#include "gadgetrl/trainer.hpp"

namespace fs = std::filesystem;
using namespace gadgetrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoDiscovery = 2;
constexpr int kExitInternal = 3;

std::string code_params(uint32_t n, uint32_t k, uint32_t d) {
  return "[[" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(d) + "]]";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Circuit files in a directory (sorted by name), or the listed dataset.
struct LoadedCircuits {
  std::vector<Circuit> circuits;
  std::vector<std::string> ids;
  std::vector<std::string> warnings;
};

LoadedCircuits load_inputs(const std::vector<std::string>& paths) {
  LoadedCircuits out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      if (fs::exists(fs::path(p) / "manifest.tsv")) {
        Dataset ds = read_dataset(p);
        for (auto& m : ds.mismatches) out.warnings.push_back(p + ": " + m);
        for (auto& e : ds.entries) {
          out.circuits.push_back(std::move(e.circuit));
          out.ids.push_back(e.manifest.id);
        }
        continue;
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".circuit") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        out.circuits.push_back(load_circuit(f.string()));
        out.ids.push_back(f.stem().string());
      }
    } else {
      out.circuits.push_back(load_circuit(p));
      out.ids.push_back(fs::path(p).stem().string());
    }
  }
  return out;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config_file;
  std::map<std::string, std::string> flags;  // config key -> value from a flag
  std::vector<std::string> overrides;        // key=value
  std::string out_dir = "run";
  std::string init_checkpoint;
  uint32_t log_every = 10;
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  TrainConfig cfg;
  std::set<std::string> given;
  if (!a.config_file.empty()) {
    cfg = load_config(a.config_file);
    std::ifstream in(a.config_file);
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (auto eq = line.find('='); eq != std::string::npos) given.insert(detail::trim(line.substr(0, eq)));
    }
  }
  for (const auto& [key, value] : a.flags) {
    cfg.set(key, value);
    given.insert(key);
  }
  for (const auto& kv : a.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
    cfg.set(detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
    given.insert(detail::trim(kv.substr(0, eq)));
  }
  for (const char* required : {"n", "d"}) {
    if (!given.count(required)) throw ConfigError(required, "required (--" + std::string(required) + " or config file)");
  }
  cfg.validate();

  std::optional<PolicyValueNets<float>> init;
  if (!a.init_checkpoint.empty()) init = load_checkpoint(a.init_checkpoint, network_config_hash(cfg));

  fs::path out(a.out_dir);
  fs::create_directories(out);
  write_file(out / "config.txt", cfg.to_text());
  std::ofstream log(out / "train_log.csv");
  log << epoch_log_csv_header();

  if (!a.quiet) {
    std::printf("training %s levels %s, %u envs x %u steps per epoch, seed %llu\n",
                code_params(cfg.n, cfg.k, cfg.d).c_str(), levels_to_text(cfg.levels).c_str(), cfg.num_envs,
                cfg.effective_rollout_length(), static_cast<unsigned long long>(cfg.seed));
  }
  auto t0 = std::chrono::steady_clock::now();
  TrainResult result = run_curriculum(
      cfg,
      [&](const EpochLog& e) {
        log << to_csv_row(e) << std::flush;
        if (e.update_aborted) std::fprintf(stderr, "epoch %u: PPO update aborted (non-finite loss)\n", e.epoch);
        if (!a.quiet && (e.epoch % a.log_every == 0 || e.success_rate > 0)) {
          std::printf("epoch %5u  d=%u  return %.4f  success %.3f\n", e.epoch, e.stage_d, e.mean_normalized_return,
                      e.success_rate);
          std::fflush(stdout);
        }
      },
      init ? &*init : nullptr);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  save_checkpoint((out / "checkpoint.bin").string(), result.nets, network_config_hash(cfg));
  for (const auto& c : result.discovered) {
    if (!verify_distance_at_least(c.final_tableau(), cfg.d)) {
      throw std::logic_error("exported circuit fails distance verification");
    }
  }
  write_dataset((out / "circuits").string(), result.discovered);

  std::printf("%s after %u epochs (%.1f s): %zu distinct %s circuit(s) in %s\n", result.stop_reason.c_str(),
              result.epochs_run, seconds, result.discovered.size(), code_params(cfg.n, cfg.k, cfg.d).c_str(),
              (out / "circuits").string().c_str());
  return result.success() ? kExitOk : kExitNoDiscovery;
}

// ---------------------------------------------------------------- verify

int run_verify(const std::string& path, std::optional<uint32_t> d_flag, double error_rate) {
  Circuit c = load_circuit(path);
  const uint32_t d = d_flag.value_or(c.d);
  auto t = c.final_tableau();
  std::printf("circuit %s %s, %zu CX, depth %zu\n", path.c_str(), code_params(c.n, c.k, c.d).c_str(), c.total_cx(),
              c.depth());
  std::printf("stabilizers: %zu rows, commute %s, independent %s, CSS %s\n", t.num_rows(),
              t.rows_commute() ? "yes" : "no", t.rows_independent() ? "yes" : "no", t.rows_pure_type() ? "yes" : "no");

  auto check = verify_distance(t, d);
  std::printf("distance >= %u: %s (%zu errors checked)\n", d, to_string(check.status), check.errors_checked);
  for (const auto& w : check.witnesses) std::printf("  undetected %s (weight %zu)\n", w.to_text().c_str(), weight(w));

  if (d >= 2 && check.status != DistanceStatus::kInfeasible) {
    auto es = ErrorSet::enumerate(c.n, std::min<size_t>(d, c.n), error_rate);
    std::printf("sigma_kl at d=%u, p=%g: %.6g\n", d, error_rate, sigma_kl(t, es));
  }
  auto w = weight_stats(t);
  std::printf("weights: count %zu min %zu max %zu mean %.3f stddev %.3f\n", w.count, w.min, w.max, w.mean, w.stddev);
  for (auto variant : {QhbVariant::kStabilizer, QhbVariant::kSelfDualCss}) {
    auto q = qhb(c.n, c.k, d, variant);
    std::printf("qhb %s: %s vs %s, %s\n", variant == QhbVariant::kStabilizer ? "stabilizer" : "self-dual CSS",
                q.lhs.str().c_str(), q.rhs.str().c_str(), q.perfect ? "perfect" : q.satisfied ? "satisfied" : "violated");
  }
  return check.status == DistanceStatus::kPass ? kExitOk : kExitNoDiscovery;
}

// ---------------------------------------------------------------- gadgets

struct GadgetArgs {
  std::optional<uint32_t> level;
  std::string orientation = "A";
  bool rules = false;
  bool expand = false;
  std::string weights_csv;
};

int run_gadgets(const GadgetArgs& a) {
  Orientation o = parse_orientation(a.orientation);
  if (!a.weights_csv.empty()) {
    if (a.weights_csv == "-") {
      std::cout << max_weight_curve_csv();
    } else {
      write_file(a.weights_csv, max_weight_curve_csv());
    }
  }
  if (a.rules || a.expand) {
    if (!a.level) throw ConfigError("level", "--rules and --expand need --level");
    if (a.rules) std::cout << rule_table(*a.level, o).to_text();
    if (a.expand) {
      for (const auto& g : Gadget{*a.level, o, 0, gadget_size(*a.level)}.expand()) {
        std::printf("%u %u\n", g.control, g.target);
      }
    }
    return kExitOk;
  }
  if (!a.weights_csv.empty()) return kExitOk;
  std::printf("%-7s %6s %6s %10s\n", "level", "qubits", "cx", "max_weight");
  for (uint32_t l = 0; l <= kMaxGadgetLevel; l++) {
    if (a.level && *a.level != l) continue;
    std::printf("%-7s %6u %6zu %10zu\n", level_name(l).c_str(), gadget_size(l), expansion_length(l),
                max_propagated_weight(l));
  }
  std::printf("cross-pattern: base %s, lifted %s\n", to_string(kCalibratedCrossPattern.base).c_str(),
              to_string(kCalibratedCrossPattern.lifted).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- preprocess

int run_preprocess(const std::string& input, std::string out_dir, size_t window, bool normalize_labels) {
  if (out_dir.empty()) out_dir = (fs::path(input) / "processed").string();
  LoadedCircuits in = load_inputs({input});
  for (const auto& w : in.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  DedupResult r = dedup(in.circuits);
  for (const auto& msg : r.rejected) std::fprintf(stderr, "rejected %s\n", msg.c_str());
  std::vector<Circuit> kept;
  std::vector<std::string> ids;
  for (size_t i = 0; i < r.kept.size(); i++) {
    kept.push_back(normalize_labels ? normalize(r.kept[i]) : r.kept[i]);
    ids.push_back(in.ids[r.kept_indices[i]]);
  }
  write_dataset(out_dir, kept, ids);
  write_file(fs::path(out_dir) / "motifs.csv", motif_csv(motif_frequencies(kept, ids, window)));
  std::printf("read %zu, rejected %zu, duplicates %zu, kept %zu -> %s\n", in.circuits.size(), r.rejected.size(),
              r.discarded, kept.size(), out_dir.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- qhb

int run_qhb(size_t n, size_t k, size_t d, const std::string& variant) {
  std::vector<QhbVariant> variants;
  if (variant == "stabilizer" || variant == "both") variants.push_back(QhbVariant::kStabilizer);
  if (variant == "self-dual" || variant == "both") variants.push_back(QhbVariant::kSelfDualCss);
  if (variants.empty()) throw ConfigError("variant", "expected stabilizer, self-dual or both");
  for (auto v : variants) {
    auto q = qhb(n, k, d, v);
    std::printf("%s (%zu,%zu,%zu): t=%zu%s, %s vs %s, %s\n", v == QhbVariant::kStabilizer ? "stabilizer" : "self-dual CSS",
                n, k, d, q.t, q.even_distance ? " (even d)" : "", q.lhs.str().c_str(), q.rhs.str().c_str(),
                q.perfect ? "perfect" : q.satisfied ? "satisfied" : "violated");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- stats

int run_stats(const std::vector<std::string>& inputs, const std::string& out) {
  LoadedCircuits in = load_inputs(inputs);
  for (const auto& w : in.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::string csv = weight_stats_csv(in.circuits, in.ids);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gadget-assisted reinforcement learning search for CSS encoding circuits"};
  app.require_subcommand(1);
  app.fallthrough();
  uint32_t workers = 1;
  auto* workers_opt =
      app.add_option("--workers", workers, "Worker threads (1 = bit-reproducible)")->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an agent and export discovered circuits");
  train_cmd->add_option("--config", train.config_file, "key = value config file")->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> train_flags{
      {"n", "Physical qubits"},
      {"k", "Logical qubits"},
      {"d", "Target distance"},
      {"levels", "Gadget levels, e.g. cx,dcx,dcx4"},
      {"seed", "RNG seed"},
      {"epochs", "Epoch budget"},
      {"max-steps", "Episode length limit"},
      {"num-envs", "Parallel environments"},
      {"rollout-length", "Steps per environment per epoch (0 = max-steps)"},
  };
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const auto& [name, help] : train_flags) {
    flag_options[name] = train_cmd->add_option("--" + name, flag_values[name], help);
  }
  train_cmd->add_option("--set", train.overrides, "Any config key, as key=value (repeatable)");
  train_cmd->add_option("--out", train.out_dir, "Output directory")->capture_default_str();
  train_cmd->add_option("--init-checkpoint", train.init_checkpoint, "Start from these network weights")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--log-every", train.log_every, "Progress line interval in epochs")->check(CLI::PositiveNumber);
  train_cmd->add_flag("--quiet", train.quiet, "Only print the final summary");

  std::string verify_path;
  std::optional<uint32_t> verify_d;
  double verify_p = 0.1;
  auto* verify_cmd = app.add_subcommand("verify", "Check a circuit file's distance and report code statistics");
  verify_cmd->add_option("circuit", verify_path, "Circuit file")->required();
  verify_cmd->add_option("--d", verify_d, "Distance to check (default: the file's d)");
  verify_cmd->add_option("--error-rate", verify_p, "p for the Sigma_KL report")->capture_default_str();

  GadgetArgs gadgets;
  auto* gadgets_cmd = app.add_subcommand("gadgets", "Inspect gadget levels and rule tables");
  gadgets_cmd->add_option("--level", gadgets.level, "0 = CX, 1 = DCX, 2 = DCX^(4), ...")
      ->check(CLI::Range(0u, kMaxGadgetLevel));
  gadgets_cmd->add_option("--orientation", gadgets.orientation, "A or B")->capture_default_str();
  gadgets_cmd->add_flag("--rules", gadgets.rules, "Print the conjugation table of --level");
  gadgets_cmd->add_flag("--expand", gadgets.expand, "Print the CX list of --level");
  gadgets_cmd->add_option("--weights-csv", gadgets.weights_csv, "Write max propagated weight vs size ('-' = stdout)");

  std::string pre_input, pre_out;
  size_t pre_window = 8;
  bool pre_keep_labels = false;
  auto* pre_cmd = app.add_subcommand("preprocess", "Deduplicate, normalize and mine motifs from circuits");
  pre_cmd->add_option("input", pre_input, "Directory of .circuit files or a dataset")->required()->check(CLI::ExistingDirectory);
  pre_cmd->add_option("--out", pre_out, "Output dataset directory (default: <input>/processed)");
  pre_cmd->add_option("--window", pre_window, "Longest motif in gates")->capture_default_str()->check(CLI::PositiveNumber);
  pre_cmd->add_flag("--keep-labels", pre_keep_labels, "Skip qubit relabelling");

  size_t q_n = 0, q_k = 0, q_d = 0;
  std::string q_variant = "both";
  auto* qhb_cmd = app.add_subcommand("qhb", "Evaluate the quantum Hamming bound");
  qhb_cmd->add_option("n", q_n)->required();
  qhb_cmd->add_option("k", q_k)->required();
  qhb_cmd->add_option("d", q_d)->required()->check(CLI::PositiveNumber);
  qhb_cmd->add_option("--variant", q_variant, "stabilizer, self-dual or both")->capture_default_str();

  std::vector<std::string> stats_inputs;
  std::string stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Stabilizer weight statistics as CSV");
  stats_cmd->add_option("inputs", stats_inputs, "Circuit files, directories or datasets")->required();
  stats_cmd->add_option("--out", stats_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      for (const auto& [name, opt] : flag_options) {
        if (opt->count()) {
          std::string key = name;
          std::replace(key.begin(), key.end(), '-', '_');
          train.flags[key] = flag_values[name];
        }
      }
      if (workers_opt->count()) train.flags["workers"] = std::to_string(workers);
      return run_train(train);
    }
    if (*verify_cmd) return run_verify(verify_path, verify_d, verify_p);
    if (*gadgets_cmd) return run_gadgets(gadgets);
    if (*pre_cmd) return run_preprocess(pre_input, pre_out, pre_window, !pre_keep_labels);
    if (*qhb_cmd) return run_qhb(q_n, q_k, q_d, q_variant);
    if (*stats_cmd) return run_stats(stats_inputs, stats_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const CircuitParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
