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
#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gadgetrl/symplectic.hpp"
#include "gadgetrl/tableau.hpp"

namespace gadgetrl {

enum class Orientation : uint8_t { kA = 0, kB = 1 };

inline char orientation_letter(Orientation o) { return o == Orientation::kA ? 'A' : 'B'; }
inline Orientation flip(Orientation o) { return o == Orientation::kA ? Orientation::kB : Orientation::kA; }
inline Orientation combine(Orientation parent, Orientation child) {
  return parent == Orientation::kA ? child : flip(child);
}
inline Orientation parse_orientation(std::string_view s) {
  if (s == "A" || s == "a") return Orientation::kA;
  if (s == "B" || s == "b") return Orientation::kB;
  throw std::invalid_argument("orientation must be A or B, got \"" + std::string(s) + "\"");
}

struct CxGate {
  uint32_t control = 0;
  uint32_t target = 0;
  bool operator==(const CxGate&) const = default;
  auto operator<=>(const CxGate&) const = default;
};

inline std::vector<CxGate> swap_roles(std::vector<CxGate> gates) {
  for (auto& g : gates) {
    std::swap(g.control, g.target);
  }
  return gates;
}

/// One sub-gadget inside a level-q gadget on m = 2^q qubits. The sub-gadget
/// covers qubits [offset * m/4, offset * m/4 + m/2) and its orientation is
/// relative to the parent's.
struct Placement {
  uint32_t offset = 0;
  Orientation orientation = Orientation::kA;
  bool operator==(const Placement&) const = default;
  auto operator<=>(const Placement&) const = default;
};

using PlacementSequence = std::array<Placement, 4>;

/// Four placements in temporal order. `base` assembles DCX^(4) from DCX;
/// `lifted` assembles every higher level from the level below.
struct CrossPattern {
  PlacementSequence base;
  PlacementSequence lifted;
  bool operator==(const CrossPattern&) const = default;
  auto operator<=>(const CrossPattern&) const = default;
};

/// Frozen result of derive_cross_pattern(); a unit test re-derives it.
inline constexpr CrossPattern kCalibratedCrossPattern{
    {{{1, Orientation::kA}, {0, Orientation::kB}, {2, Orientation::kB}, {1, Orientation::kA}}},
    {{{1, Orientation::kA}, {0, Orientation::kA}, {2, Orientation::kA}, {1, Orientation::kA}}},
};

inline std::string to_string(const PlacementSequence& seq) {
  std::string out;
  for (const auto& p : seq) {
    if (!out.empty()) out += ' ';
    out += std::to_string(p.offset);
    out += orientation_letter(p.orientation);
  }
  return out;
}

/// Reference conjugation tables for the first gadget generations, in
/// orientation A. Row i is the image of the weight-1 Pauli on qubit i.
namespace reference_tables {
inline constexpr std::array<std::string_view, 2> kCxX{"XX", "IX"};
inline constexpr std::array<std::string_view, 2> kCxZ{"ZI", "ZZ"};
inline constexpr std::array<std::string_view, 2> kCxBX{"XI", "XX"};
inline constexpr std::array<std::string_view, 2> kCxBZ{"ZZ", "IZ"};
inline constexpr std::array<std::string_view, 2> kDcxX{"IX", "XX"};
inline constexpr std::array<std::string_view, 2> kDcxZ{"ZZ", "ZI"};
inline constexpr std::array<std::string_view, 4> kDcx4X{"XIXI", "IXXX", "XXXX", "IXXI"};
inline constexpr std::array<std::string_view, 4> kDcx4Z{"IZZI", "ZZZZ", "ZZZI", "IZIZ"};
inline constexpr std::array<std::string_view, 8> kDcx8X{
    "XIXIXIII", "IXXXIXII", "XXIIXIXI", "IXIIXXIX",
    "XIXXXIIX", "IXIXIXXI", "IIXIIXXX", "IIIXXIXI",
};
}  // namespace reference_tables

inline constexpr uint32_t kMaxGadgetLevel = 5;

inline uint32_t gadget_size(uint32_t level) { return level == 0 ? 2 : uint32_t{1} << level; }

/// CX count of a level-q expansion: 1 for q = 0, 2 * 4^(q-1) otherwise.
inline size_t expansion_length(uint32_t level) {
  return level == 0 ? 1 : size_t{2} << (2 * (level - 1));
}

inline std::string level_name(uint32_t level) {
  if (level == 0) return "cx";
  if (level == 1) return "dcx";
  return "dcx" + std::to_string(gadget_size(level));
}

inline uint32_t parse_level(std::string_view name) {
  for (uint32_t q = 0; q <= kMaxGadgetLevel; q++) {
    if (name == level_name(q) || name == std::to_string(q)) {
      return q;
    }
  }
  throw std::invalid_argument("unknown gadget level \"" + std::string(name) +
                              "\" (expected cx, dcx, dcx4, dcx8, dcx16, dcx32 or 0-5)");
}

namespace detail {

inline void expand_into(uint32_t level, Orientation o, std::span<const uint32_t> qubits,
                        const CrossPattern& pattern, std::vector<CxGate>& out) {
  if (level == 0) {
    if (o == Orientation::kA) {
      out.push_back({qubits[0], qubits[1]});
    } else {
      out.push_back({qubits[1], qubits[0]});
    }
    return;
  }
  if (level == 1) {
    uint32_t a = qubits[0], b = qubits[1];
    if (o == Orientation::kB) std::swap(a, b);
    out.push_back({a, b});
    out.push_back({b, a});
    return;
  }
  const auto& seq = level == 2 ? pattern.base : pattern.lifted;
  size_t quarter = qubits.size() / 4;
  for (const auto& p : seq) {
    expand_into(level - 1, combine(o, p.orientation),
                qubits.subspan(p.offset * quarter, 2 * quarter), pattern, out);
  }
}

}  // namespace detail

/// Expands a level-q gadget acting on `qubits` (listed in gadget order).
inline std::vector<CxGate> expand_on(uint32_t level, Orientation o,
                                     std::span<const uint32_t> qubits,
                                     const CrossPattern& pattern = kCalibratedCrossPattern) {
  if (qubits.size() != gadget_size(level)) {
    throw std::invalid_argument(level_name(level) + " acts on " +
                                std::to_string(gadget_size(level)) + " qubits, got " +
                                std::to_string(qubits.size()));
  }
  std::vector<uint32_t> sorted(qubits.begin(), qubits.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument(level_name(level) + " given repeated qubits");
  }
  std::vector<CxGate> out;
  out.reserve(expansion_length(level));
  detail::expand_into(level, o, qubits, pattern, out);
  return out;
}

/// A gadget placed on a periodic ring of `ring_size` qubits, covering the
/// consecutive indices anchor, anchor+1, ... (mod ring_size).
struct Gadget {
  uint32_t level = 0;
  Orientation orientation = Orientation::kA;
  uint32_t anchor = 0;
  uint32_t ring_size = 0;

  uint32_t size() const { return gadget_size(level); }

  std::vector<uint32_t> qubits() const {
    std::vector<uint32_t> q(size());
    for (uint32_t i = 0; i < q.size(); i++) {
      q[i] = (anchor + i) % ring_size;
    }
    return q;
  }

  std::vector<CxGate> expand(const CrossPattern& pattern = kCalibratedCrossPattern) const {
    if (ring_size == 0 || anchor >= ring_size) {
      throw std::invalid_argument("gadget anchor outside ring");
    }
    return expand_on(level, orientation, qubits(), pattern);
  }

  bool operator==(const Gadget&) const = default;
};

inline void apply_gates(StabilizerTableau& t, std::span<const CxGate> gates) {
  for (const auto& g : gates) {
    t.apply_cx(g.control, g.target);
  }
}

/// Images of every weight-1 X and Z Pauli on m qubits under a gate sequence.
struct RuleTable {
  uint32_t level = 0;
  Orientation orientation = Orientation::kA;
  size_t num_qubits = 0;
  std::vector<PauliString> x_images;
  std::vector<PauliString> z_images;

  std::vector<std::string> x_text() const {
    std::vector<std::string> out;
    for (const auto& p : x_images) out.push_back(p.to_text());
    return out;
  }
  std::vector<std::string> z_text() const {
    std::vector<std::string> out;
    for (const auto& p : z_images) out.push_back(p.to_text());
    return out;
  }

  size_t max_weight() const {
    size_t best = 0;
    for (const auto& p : x_images) best = std::max(best, weight(p));
    for (const auto& p : z_images) best = std::max(best, weight(p));
    return best;
  }

  /// Arrow notation, one line per input: "XIII -> XIXI , ZIII -> IZZI".
  std::string to_text(std::string_view arrow = " -> ") const {
    std::string out;
    for (size_t q = 0; q < num_qubits; q++) {
      out += PauliString::single_x(num_qubits, q).to_text();
      out += arrow;
      out += x_images[q].to_text();
      out += " , ";
      out += PauliString::single_z(num_qubits, q).to_text();
      out += arrow;
      out += z_images[q].to_text();
      out += '\n';
    }
    return out;
  }
};

/// Conjugates each weight-1 Pauli through `gates` by tableau evolution.
inline RuleTable conjugation_table(std::span<const CxGate> gates, size_t m) {
  StabilizerTableau t(m, 0);
  for (size_t q = 0; q < m; q++) t.add_row(PauliString::single_x(m, q));
  for (size_t q = 0; q < m; q++) t.add_row(PauliString::single_z(m, q));
  apply_gates(t, gates);
  RuleTable table;
  table.num_qubits = m;
  for (size_t q = 0; q < m; q++) table.x_images.push_back(t.row(q));
  for (size_t q = 0; q < m; q++) table.z_images.push_back(t.row(m + q));
  return table;
}

inline std::vector<uint32_t> iota_qubits(size_t m) {
  std::vector<uint32_t> q(m);
  std::iota(q.begin(), q.end(), 0u);
  return q;
}

inline RuleTable compute_rule_table(uint32_t level, Orientation o,
                                    const CrossPattern& pattern = kCalibratedCrossPattern) {
  auto qubits = iota_qubits(gadget_size(level));
  auto gates = expand_on(level, o, qubits, pattern);
  RuleTable table = conjugation_table(gates, qubits.size());
  table.level = level;
  table.orientation = o;
  return table;
}

/// Cached rule table for the calibrated hierarchy.
inline const RuleTable& rule_table(uint32_t level, Orientation o) {
  if (level > kMaxGadgetLevel) {
    throw std::invalid_argument("gadget level " + std::to_string(level) + " above maximum " +
                                std::to_string(kMaxGadgetLevel));
  }
  static std::mutex mu;
  static std::map<std::pair<uint32_t, Orientation>, RuleTable> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(level, o);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, compute_rule_table(level, o)).first;
  }
  return it->second;
}

inline size_t max_propagated_weight(uint32_t level) {
  return rule_table(level, Orientation::kA).max_weight();
}

/// CSV "m,max_weight" for DCX through DCX^(2^max_level).
inline std::string max_weight_curve_csv(uint32_t max_level = kMaxGadgetLevel) {
  std::string out = "m,max_weight\n";
  for (uint32_t q = 1; q <= max_level; q++) {
    out += std::to_string(gadget_size(q)) + "," + std::to_string(max_propagated_weight(q)) + "\n";
  }
  return out;
}

template <size_t N>
bool images_match(const std::vector<PauliString>& images,
                  const std::array<std::string_view, N>& expected) {
  if (images.size() != N) return false;
  for (size_t i = 0; i < N; i++) {
    if (images[i].to_text() != expected[i]) return false;
  }
  return true;
}

/// Outcome of the brute-force calibration of the cross-pattern.
struct CrossPatternSearch {
  /// Four-DCX sequences (as ordered qubit pairs) reproducing the DCX^(4) table.
  std::vector<std::array<std::pair<uint32_t, uint32_t>, 4>> base_matches;
  /// Every (base, lifted) pair that also reproduces the DCX^(8) table.
  std::vector<CrossPattern> full_matches;
  size_t candidates_examined = 0;
  std::optional<CrossPattern> selected;  ///< lexicographically smallest full match
};

/// Searches all 12^4 ordered sequences of four DCX gates over qubit pairs of
/// {0,1,2,3} for those reproducing the DCX^(4) tables, then, keeping each
/// match's block offsets and temporal order, searches the 2^4 sub-gadget
/// orientations of the 8-qubit assembly against the DCX^(8) table.
inline CrossPatternSearch search_cross_patterns() {
  CrossPatternSearch result;
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (uint32_t a = 0; a < 4; a++) {
    for (uint32_t b = 0; b < 4; b++) {
      if (a != b) pairs.emplace_back(a, b);
    }
  }
  const size_t num_pairs = pairs.size();
  std::vector<CxGate> gates;
  for (size_t code = 0; code < num_pairs * num_pairs * num_pairs * num_pairs; code++) {
    std::array<std::pair<uint32_t, uint32_t>, 4> seq;
    size_t rest = code;
    for (int i = 3; i >= 0; i--) {
      seq[i] = pairs[rest % num_pairs];
      rest /= num_pairs;
    }
    gates.clear();
    for (auto [a, b] : seq) {
      gates.push_back({a, b});
      gates.push_back({b, a});
    }
    result.candidates_examined++;
    RuleTable t = conjugation_table(gates, 4);
    if (images_match(t.x_images, reference_tables::kDcx4X) &&
        images_match(t.z_images, reference_tables::kDcx4Z)) {
      result.base_matches.push_back(seq);
    }
  }

  auto qubits8 = iota_qubits(8);
  for (const auto& seq : result.base_matches) {
    PlacementSequence base;
    bool contiguous = true;
    for (size_t i = 0; i < 4; i++) {
      auto [a, b] = seq[i];
      if (a + 1 != b && b + 1 != a) {
        contiguous = false;
        break;
      }
      base[i] = {std::min(a, b), a < b ? Orientation::kA : Orientation::kB};
    }
    if (!contiguous) {
      continue;
    }
    for (uint32_t mask = 0; mask < 16; mask++) {
      CrossPattern candidate{base, base};
      for (size_t i = 0; i < 4; i++) {
        candidate.lifted[i].orientation = (mask >> (3 - i)) & 1 ? Orientation::kB : Orientation::kA;
      }
      auto lifted_gates = expand_on(3, Orientation::kA, qubits8, candidate);
      RuleTable t = conjugation_table(lifted_gates, 8);
      if (images_match(t.x_images, reference_tables::kDcx8X)) {
        result.full_matches.push_back(candidate);
      }
    }
  }
  if (!result.full_matches.empty()) {
    result.selected = *std::min_element(result.full_matches.begin(), result.full_matches.end());
  }
  return result;
}

/// Runs the calibration search; throws if no pattern reproduces both tables.
inline CrossPattern derive_cross_pattern() {
  auto search = search_cross_patterns();
  if (!search.selected) {
    throw std::logic_error("no four-DCX cross-pattern reproduces both the DCX^(4) and DCX^(8) "
                           "tables (" + std::to_string(search.base_matches.size()) +
                           " DCX^(4) matches)");
  }
  return *search.selected;
}

/// For each temporally adjacent pair of sub-units (the two CX of a DCX, or
/// the four sub-gadgets of a higher level), whether the pair commutes.
inline std::vector<bool> adjacent_units_commute(uint32_t level,
                                                const CrossPattern& pattern = kCalibratedCrossPattern) {
  if (level == 0) {
    return {};
  }
  auto qubits = iota_qubits(gadget_size(level));
  std::vector<std::vector<CxGate>> units;
  if (level == 1) {
    auto g = expand_on(1, Orientation::kA, qubits, pattern);
    units = {{g[0]}, {g[1]}};
  } else {
    const auto& seq = level == 2 ? pattern.base : pattern.lifted;
    size_t quarter = qubits.size() / 4;
    for (const auto& p : seq) {
      units.push_back(expand_on(level - 1, p.orientation,
                                std::span<const uint32_t>(qubits).subspan(p.offset * quarter,
                                                                          2 * quarter),
                                pattern));
    }
  }
  std::vector<bool> out;
  for (size_t i = 0; i + 1 < units.size(); i++) {
    std::vector<CxGate> ab = units[i];
    ab.insert(ab.end(), units[i + 1].begin(), units[i + 1].end());
    std::vector<CxGate> ba = units[i + 1];
    ba.insert(ba.end(), units[i].begin(), units[i].end());
    RuleTable t_ab = conjugation_table(ab, qubits.size());
    RuleTable t_ba = conjugation_table(ba, qubits.size());
    out.push_back(t_ab.x_images == t_ba.x_images && t_ab.z_images == t_ba.z_images);
  }
  return out;
}

/// Flat action index -> gadget placement on an n-qubit ring.
class ActionTable {
 public:
  struct Action {
    Gadget gadget;
    std::vector<CxGate> gates;
  };

  static ActionTable build(uint32_t n, std::span<const uint32_t> levels) {
    ActionTable table;
    table.n_ = n;
    std::vector<uint32_t> sorted(levels.begin(), levels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (uint32_t level : sorted) {
      if (level > kMaxGadgetLevel) {
        throw std::invalid_argument("gadget level " + std::to_string(level) + " not supported");
      }
      bool fits = level == 0 ? n >= 2 : gadget_size(level) < n;
      if (!fits) {
        table.warnings_.push_back(level_name(level) + " needs more than " +
                                  std::to_string(gadget_size(level)) + " ring qubits; n=" +
                                  std::to_string(n) + ", level excluded");
        continue;
      }
      table.levels_.push_back(level);
      for (uint32_t anchor = 0; anchor < n; anchor++) {
        for (Orientation o : {Orientation::kA, Orientation::kB}) {
          Gadget g{level, o, anchor, n};
          table.actions_.push_back({g, g.expand()});
        }
      }
    }
    return table;
  }

  uint32_t num_qubits() const { return n_; }
  size_t size() const { return actions_.size(); }
  const Action& operator[](size_t i) const { return actions_.at(i); }
  std::span<const uint32_t> levels() const { return levels_; }
  std::span<const std::string> warnings() const { return warnings_; }

  /// Index of a gadget, if present.
  std::optional<size_t> find(const Gadget& g) const {
    for (size_t i = 0; i < actions_.size(); i++) {
      if (actions_[i].gadget == g) return i;
    }
    return std::nullopt;
  }

 private:
  uint32_t n_ = 0;
  std::vector<uint32_t> levels_;
  std::vector<Action> actions_;
  std::vector<std::string> warnings_;
};

inline ActionTable enumerate_actions(uint32_t n, std::span<const uint32_t> levels) {
  return ActionTable::build(n, levels);
}

}  // namespace gadgetrl
