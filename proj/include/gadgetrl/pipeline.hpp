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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadgetrl/circuit.hpp"
#include "gadgetrl/code_analysis.hpp"
#include "gadgetrl/config.hpp"
#include "gadgetrl/tableau.hpp"

namespace gadgetrl {

struct DedupResult {
  std::vector<Circuit> kept;
  std::vector<size_t> kept_indices;  ///< positions in the input
  size_t discarded = 0;              ///< duplicates of an earlier canonical form
  std::vector<std::string> rejected;  ///< one diagnostic per unusable circuit
};

/// Keeps the first circuit per canonical final tableau, in input order.
/// Circuits that do not apply, or whose (n, k) differs from the first
/// usable circuit, are rejected with a diagnostic.
inline DedupResult dedup(const std::vector<Circuit>& circuits) {
  DedupResult out;
  std::set<BinaryMatrix> seen;
  std::optional<std::pair<uint32_t, uint32_t>> shape;
  for (size_t i = 0; i < circuits.size(); i++) {
    const Circuit& c = circuits[i];
    BinaryMatrix canonical;
    try {
      canonical = c.final_tableau().canonical_form();
    } catch (const std::exception& e) {
      out.rejected.push_back("circuit " + std::to_string(i) + ": " + e.what());
      continue;
    }
    if (!shape) shape = std::make_pair(c.n, c.k);
    if (shape->first != c.n || shape->second != c.k) {
      out.rejected.push_back("circuit " + std::to_string(i) + ": [[" + std::to_string(c.n) + "," +
                             std::to_string(c.k) + "]] differs from the dataset's [[" +
                             std::to_string(shape->first) + "," + std::to_string(shape->second) + "]]");
      continue;
    }
    if (seen.insert(std::move(canonical)).second) {
      out.kept.push_back(c);
      out.kept_indices.push_back(i);
    } else {
      out.discarded++;
    }
  }
  return out;
}

/// Old label -> new label used by normalize(). Logical qubits come first,
/// then H-carrying qubits, then the remaining qubits by first use in the
/// gate list (Bell CXs included). Within the logical and H groups the order
/// is first use as well; qubits never touched by a gate follow in ascending
/// index. Using first use instead of the raw index makes the labelling
/// invariant under permutations of the input labels.
inline std::vector<uint32_t> normalization_map(const Circuit& c) {
  c.validate();
  constexpr uint32_t kUnset = UINT32_MAX;
  std::vector<uint32_t> first_use(c.n, kUnset);
  auto gates = c.all_gates();
  for (uint32_t i = 0; i < gates.size(); i++) {
    for (uint32_t q : {gates[i].control, gates[i].target}) {
      if (first_use[q] == kUnset) first_use[q] = 2 * i + (q == gates[i].target);
    }
  }
  auto by_use = [&](uint32_t a, uint32_t b) {
    return first_use[a] != first_use[b] ? first_use[a] < first_use[b] : a < b;
  };
  std::vector<uint32_t> map(c.n, kUnset);
  uint32_t next = 0;
  auto assign = [&](std::vector<uint32_t> group) {
    std::sort(group.begin(), group.end(), by_use);
    for (uint32_t q : group) {
      if (map[q] == kUnset) map[q] = next++;
    }
  };
  assign(c.init.logical);
  assign(c.hadamard_qubits());
  std::vector<uint32_t> rest;
  for (uint32_t q = 0; q < c.n; q++) {
    if (map[q] == kUnset) rest.push_back(q);
  }
  assign(rest);
  return map;
}

/// Applies `map` (old -> new label) to every qubit reference; list order is
/// kept, logical and hadamard lists are sorted.
inline Circuit relabel(const Circuit& c, const std::vector<uint32_t>& map) {
  if (map.size() != c.n) throw std::invalid_argument("relabel map has the wrong size");
  std::vector<bool> hit(c.n, false);
  for (uint32_t v : map) {
    if (v >= c.n || hit[v]) throw std::invalid_argument("relabel map is not a permutation");
    hit[v] = true;
  }
  Circuit out;
  out.n = c.n;
  out.k = c.k;
  out.d = c.d;
  for (uint32_t q : c.init.logical) out.init.logical.push_back(map[q]);
  for (uint32_t q : c.init.hadamard) out.init.hadamard.push_back(map[q]);
  std::sort(out.init.logical.begin(), out.init.logical.end());
  std::sort(out.init.hadamard.begin(), out.init.hadamard.end());
  for (auto [a, b] : c.init.bell) out.init.bell.emplace_back(map[a], map[b]);
  for (const auto& g : c.cx) out.cx.push_back({map[g.control], map[g.target]});
  return out;
}

/// Relabelled copy in normal form. Gadget actions are flattened away, since
/// their ring anchors have no meaning after relabelling.
inline Circuit normalize(const Circuit& c) { return relabel(c, normalization_map(c)); }

/// Tableau with qubit q moved to column map[q].
inline StabilizerTableau relabel(const StabilizerTableau& t, const std::vector<uint32_t>& map) {
  if (map.size() != t.num_qubits()) throw std::invalid_argument("relabel map has the wrong size");
  std::vector<PauliString> rows;
  for (const auto& row : t.rows()) {
    PauliString p(t.num_qubits());
    for (size_t q = 0; q < t.num_qubits(); q++) {
      if (row.xs()[q]) p.xs().set(map[q], true);
      if (row.zs()[q]) p.zs().set(map[q], true);
    }
    p.set_sign(row.sign());
    rows.push_back(std::move(p));
  }
  StabilizerTableau out(t.num_qubits(), t.num_logical());
  for (auto& r : rows) out.add_row(std::move(r));
  return out;
}

struct MotifCount {
  std::string signature;  ///< "c>t c>t ..." with labels shifted to start at 0
  size_t length = 0;
  size_t count = 0;
  std::string example;  ///< id of the first circuit containing it
};

/// Shape of a gate window: labels shifted so the smallest is 0.
inline std::string motif_signature(std::span<const CxGate> gates) {
  uint32_t lo = UINT32_MAX;
  for (const auto& g : gates) lo = std::min({lo, g.control, g.target});
  std::string s;
  for (size_t i = 0; i < gates.size(); i++) {
    if (i) s += ' ';
    s += std::to_string(gates[i].control - lo) + ">" + std::to_string(gates[i].target - lo);
  }
  return s;
}

/// Counts every contiguous gate window of length 1..window across the
/// circuits, sorted by count (desc), then length (desc), then signature.
/// Bell-pair CXs are left out unless include_init is set.
inline std::vector<MotifCount> motif_frequencies(const std::vector<Circuit>& circuits,
                                                 const std::vector<std::string>& ids, size_t window,
                                                 bool include_init = false) {
  if (!ids.empty() && ids.size() != circuits.size()) throw std::invalid_argument("ids/circuits size mismatch");
  std::map<std::string, MotifCount> table;
  for (size_t ci = 0; ci < circuits.size(); ci++) {
    auto gates = include_init ? circuits[ci].all_gates() : circuits[ci].cx;
    std::string id = ids.empty() ? std::to_string(ci) : ids[ci];
    for (size_t start = 0; start < gates.size(); start++) {
      for (size_t len = 1; len <= window && start + len <= gates.size(); len++) {
        std::string sig = motif_signature(std::span<const CxGate>(gates).subspan(start, len));
        auto [it, inserted] = table.try_emplace(sig, MotifCount{sig, len, 0, id});
        it->second.count++;
      }
    }
  }
  std::vector<MotifCount> out;
  out.reserve(table.size());
  for (auto& [sig, m] : table) out.push_back(std::move(m));
  std::stable_sort(out.begin(), out.end(), [](const MotifCount& a, const MotifCount& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.length != b.length) return a.length > b.length;
    return a.signature < b.signature;
  });
  return out;
}

inline std::string motif_csv(const std::vector<MotifCount>& motifs) {
  std::string out = "signature,length,count,example\n";
  for (const auto& m : motifs) {
    out += m.signature + "," + std::to_string(m.length) + "," + std::to_string(m.count) + "," + m.example + "\n";
  }
  return out;
}

/// 64-bit FNV-1a of the canonical form text.
inline uint64_t canonical_hash(const StabilizerTableau& t) { return fnv1a(to_text(t.canonical_form())); }

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct ManifestEntry {
  std::string id;
  std::string file;
  uint32_t n = 0, k = 0, d = 0;
  std::string canonical_hash;
  WeightStats weights;

  bool operator==(const ManifestEntry& o) const {
    return id == o.id && file == o.file && n == o.n && k == o.k && d == o.d && canonical_hash == o.canonical_hash &&
           weights.count == o.weights.count && weights.min == o.weights.min && weights.max == o.weights.max;
  }
};

inline ManifestEntry make_manifest_entry(const std::string& id, const std::string& file, const Circuit& c) {
  auto t = c.final_tableau();
  return {id, file, c.n, c.k, c.d, hex64(canonical_hash(t)), weight_stats(t)};
}

inline std::string manifest_header() {
  return "id\tfile\tn\tk\td\tcanonical_hash\tweight_count\tweight_min\tweight_max\tweight_mean\tweight_stddev\n";
}

inline std::string to_tsv_row(const ManifestEntry& e) {
  char stats[128];
  std::snprintf(stats, sizeof stats, "%zu\t%zu\t%zu\t%.6f\t%.6f", e.weights.count, e.weights.min, e.weights.max,
                e.weights.mean, e.weights.stddev);
  return e.id + "\t" + e.file + "\t" + std::to_string(e.n) + "\t" + std::to_string(e.k) + "\t" + std::to_string(e.d) +
         "\t" + e.canonical_hash + "\t" + stats + "\n";
}

struct DatasetEntry {
  ManifestEntry manifest;
  Circuit circuit;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> mismatches;  ///< manifest rows disagreeing with their circuit file

  std::vector<Circuit> circuits() const {
    std::vector<Circuit> out;
    for (const auto& e : entries) out.push_back(e.circuit);
    return out;
  }
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.manifest.id);
    return out;
  }
};

/// Writes one `<id>.circuit` file per entry plus manifest.tsv. Ids default
/// to c0000, c0001, ...
inline std::vector<ManifestEntry> write_dataset(const std::string& dir, const std::vector<Circuit>& circuits,
                                                std::vector<std::string> ids = {}) {
  namespace fs = std::filesystem;
  if (ids.empty()) {
    for (size_t i = 0; i < circuits.size(); i++) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "c%04zu", i);
      ids.push_back(buf);
    }
  }
  if (ids.size() != circuits.size()) throw std::invalid_argument("ids/circuits size mismatch");
  fs::create_directories(dir);
  std::vector<ManifestEntry> manifest;
  std::string tsv = manifest_header();
  for (size_t i = 0; i < circuits.size(); i++) {
    std::string file = ids[i] + ".circuit";
    save_circuit(circuits[i], (fs::path(dir) / file).string());
    manifest.push_back(make_manifest_entry(ids[i], file, circuits[i]));
    tsv += to_tsv_row(manifest.back());
  }
  std::ofstream out(fs::path(dir) / "manifest.tsv");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << tsv;
  return manifest;
}

/// Reads manifest.tsv and every circuit it lists. Parse failures throw
/// CircuitParseError; rows whose n/k/d or canonical hash disagree with the
/// circuit file are listed in `mismatches`.
inline Dataset read_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "manifest.tsv");
  if (!in) throw std::runtime_error("no manifest.tsv in " + dir);
  Dataset ds;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    if (f.size() != 11) {
      throw CircuitParseError(line_no, "manifest row has " + std::to_string(f.size()) + " fields, expected 11",
                              (fs::path(dir) / "manifest.tsv").string());
    }
    ManifestEntry m;
    try {
      m.id = f[0];
      m.file = f[1];
      m.n = static_cast<uint32_t>(std::stoul(f[2]));
      m.k = static_cast<uint32_t>(std::stoul(f[3]));
      m.d = static_cast<uint32_t>(std::stoul(f[4]));
      m.canonical_hash = f[5];
      m.weights.count = std::stoul(f[6]);
      m.weights.min = std::stoul(f[7]);
      m.weights.max = std::stoul(f[8]);
      m.weights.mean = std::stod(f[9]);
      m.weights.stddev = std::stod(f[10]);
    } catch (const std::exception&) {
      throw CircuitParseError(line_no, "malformed numeric field in manifest row",
                              (fs::path(dir) / "manifest.tsv").string());
    }
    Circuit c = load_circuit((fs::path(dir) / m.file).string());
    ManifestEntry actual = make_manifest_entry(m.id, m.file, c);
    if (!(actual == m)) {
      ds.mismatches.push_back(m.id + ": manifest hash " + m.canonical_hash + " vs circuit " + actual.canonical_hash);
    }
    ds.entries.push_back({m, std::move(c)});
  }
  return ds;
}

/// Per-dataset stabilizer weight summary as CSV.
inline std::string weight_stats_csv(const std::vector<Circuit>& circuits, const std::vector<std::string>& ids) {
  std::string out = "id,n,k,d,rows,min,max,mean,stddev\n";
  std::vector<size_t> all;
  for (size_t i = 0; i < circuits.size(); i++) {
    auto w = row_weights(circuits[i].final_tableau());
    all.insert(all.end(), w.begin(), w.end());
    auto s = weight_stats(std::span<const size_t>(w));
    char buf[160];
    std::snprintf(buf, sizeof buf, ",%u,%u,%u,%zu,%zu,%zu,%.6f,%.6f\n", circuits[i].n, circuits[i].k, circuits[i].d,
                  s.count, s.min, s.max, s.mean, s.stddev);
    out += (ids.empty() ? std::to_string(i) : ids[i]) + buf;
  }
  auto s = weight_stats(std::span<const size_t>(all));
  char buf[160];
  std::snprintf(buf, sizeof buf, "all,,,,%zu,%zu,%zu,%.6f,%.6f\n", s.count, s.min, s.max, s.mean, s.stddev);
  out += buf;
  return out;
}

}  // namespace gadgetrl
