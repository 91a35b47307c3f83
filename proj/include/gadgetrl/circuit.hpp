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
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gadgetrl/gadgets.hpp"
#include "gadgetrl/tableau.hpp"

namespace gadgetrl {

/// Initial layer: logical qubits are left free, Bell pairs (a, b) are H(a)
/// then CX(a, b), `hadamard` qubits get a lone H, every other qubit stays |0>.
struct InitLayer {
  std::vector<uint32_t> logical;
  std::vector<uint32_t> hadamard;
  std::vector<std::pair<uint32_t, uint32_t>> bell;

  bool operator==(const InitLayer&) const = default;
};

struct ActionRecord {
  uint32_t level = 0;
  uint32_t anchor = 0;
  Orientation orientation = Orientation::kA;

  bool operator==(const ActionRecord&) const = default;
};

/// A discovered encoding circuit. `cx` is the authoritative gate list after
/// the init layer; `actions`, when present, is the gadget-level view of it.
struct Circuit {
  uint32_t n = 0;
  uint32_t k = 0;
  uint32_t d = 0;
  InitLayer init;
  std::vector<ActionRecord> actions;
  std::vector<CxGate> cx;

  bool operator==(const Circuit&) const = default;

  /// Qubits receiving H in the init layer, in ascending order.
  std::vector<uint32_t> hadamard_qubits() const {
    std::vector<uint32_t> out = init.hadamard;
    for (auto [a, b] : init.bell) out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Bell-pair CXs followed by the action gates.
  std::vector<CxGate> all_gates() const {
    std::vector<CxGate> out;
    for (auto [a, b] : init.bell) out.push_back({a, b});
    out.insert(out.end(), cx.begin(), cx.end());
    return out;
  }

  size_t total_cx() const { return init.bell.size() + cx.size(); }

  /// Layer count with H gates and CX gates scheduled as soon as possible.
  size_t depth() const {
    std::vector<size_t> level(n, 0);
    for (uint32_t q : hadamard_qubits()) level.at(q) = 1;
    for (const auto& g : all_gates()) {
      size_t l = std::max(level.at(g.control), level.at(g.target)) + 1;
      level[g.control] = level[g.target] = l;
    }
    return n == 0 ? 0 : *std::max_element(level.begin(), level.end());
  }

  /// Throws std::invalid_argument describing the first inconsistency.
  void validate() const {
    if (n == 0) throw std::invalid_argument("circuit has no qubits");
    if (k > n) throw std::invalid_argument("k exceeds n");
    std::vector<int> role(n, 0);
    auto claim = [&](uint32_t q, const char* what) {
      if (q >= n) {
        throw std::invalid_argument(std::string(what) + " qubit " + std::to_string(q) +
                                    " out of range for n=" + std::to_string(n));
      }
      if (role[q]++) {
        throw std::invalid_argument("qubit " + std::to_string(q) + " used twice in init layer");
      }
    };
    for (uint32_t q : init.logical) claim(q, "logical");
    for (uint32_t q : init.hadamard) claim(q, "hadamard");
    for (auto [a, b] : init.bell) {
      claim(a, "bell");
      claim(b, "bell");
    }
    if (init.logical.size() != k) {
      throw std::invalid_argument("init layer lists " + std::to_string(init.logical.size()) +
                                  " logical qubits, header says k=" + std::to_string(k));
    }
    for (size_t i = 0; i < cx.size(); i++) {
      const auto& g = cx[i];
      if (g.control >= n || g.target >= n || g.control == g.target) {
        throw std::invalid_argument("cx gate " + std::to_string(i) + " (" +
                                    std::to_string(g.control) + "," + std::to_string(g.target) +
                                    ") invalid for n=" + std::to_string(n));
      }
    }
    if (!actions.empty()) {
      std::vector<CxGate> expanded;
      for (const auto& a : actions) {
        if (a.level > kMaxGadgetLevel || a.anchor >= n ||
            (a.level > 0 && gadget_size(a.level) >= n)) {
          throw std::invalid_argument("action " + level_name(std::min(a.level, kMaxGadgetLevel)) +
                                      " at anchor " + std::to_string(a.anchor) +
                                      " does not fit n=" + std::to_string(n));
        }
        auto g = Gadget{a.level, a.orientation, a.anchor, n}.expand();
        expanded.insert(expanded.end(), g.begin(), g.end());
      }
      if (expanded != cx) {
        throw std::invalid_argument("cx block does not match the expansion of the actions block");
      }
    }
  }

  StabilizerTableau initial_tableau() const {
    validate();
    std::vector<bool> is_logical(n, false);
    for (uint32_t q : init.logical) is_logical[q] = true;
    StabilizerTableau t(n, k);
    for (uint32_t q = 0; q < n; q++) {
      if (!is_logical[q]) t.add_row(PauliString::single_z(n, q));
    }
    for (uint32_t q : hadamard_qubits()) t.apply_h(q);
    for (auto [a, b] : init.bell) t.apply_cx(a, b);
    return t;
  }

  StabilizerTableau final_tableau() const {
    StabilizerTableau t = initial_tableau();
    apply_gates(t, cx);
    return t;
  }
};

/// Parse failure with the 1-based line it occurred on (0 when not tied to a line).
class CircuitParseError : public std::runtime_error {
 public:
  CircuitParseError(size_t line, const std::string& message, const std::string& source = "")
      : std::runtime_error(format(line, message, source)), line_(line), message_(message) {}
  size_t line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  static std::string format(size_t line, const std::string& message, const std::string& source) {
    std::string out = source.empty() ? "" : source + ": ";
    if (line) out += "line " + std::to_string(line) + ": ";
    return out + message;
  }

  size_t line_;
  std::string message_;
};

/// Text format, one item per line:
///
///   <n> <k> <d>
///   init
///   logical <q>...
///   hadamard <q>...
///   bell <a> <b>          (zero or more)
///   actions
///   <level> <anchor> <A|B> (zero or more)
///   cx
///   <control> <target>    (zero or more)
///
/// Lines starting with '#' and blank lines are ignored by the reader; the
/// writer emits neither, so write(read(write(c))) is byte-identical.
inline std::string write_circuit(const Circuit& c) {
  std::ostringstream out;
  out << c.n << ' ' << c.k << ' ' << c.d << '\n';
  out << "init\n";
  out << "logical";
  for (uint32_t q : c.init.logical) out << ' ' << q;
  out << "\nhadamard";
  for (uint32_t q : c.init.hadamard) out << ' ' << q;
  out << '\n';
  for (auto [a, b] : c.init.bell) out << "bell " << a << ' ' << b << '\n';
  out << "actions\n";
  for (const auto& a : c.actions) {
    out << a.level << ' ' << a.anchor << ' ' << orientation_letter(a.orientation) << '\n';
  }
  out << "cx\n";
  for (const auto& g : c.cx) out << g.control << ' ' << g.target << '\n';
  return out.str();
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) i++;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') j++;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline uint32_t parse_u32(std::string_view tok, size_t line, const char* what) {
  uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw CircuitParseError(line, std::string("expected non-negative integer for ") + what +
                                      ", got \"" + std::string(tok) + "\"");
  }
  return v;
}

}  // namespace detail

inline Circuit read_circuit(std::string_view text) {
  Circuit c;
  enum class Section { kHeader, kInitStart, kInit, kActions, kCx } section = Section::kHeader;
  bool saw_logical = false, saw_hadamard = false;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    line_no++;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    switch (section) {
      case Section::kHeader:
        if (tok.size() != 3) throw CircuitParseError(line_no, "header must be \"<n> <k> <d>\"");
        c.n = detail::parse_u32(tok[0], line_no, "n");
        c.k = detail::parse_u32(tok[1], line_no, "k");
        c.d = detail::parse_u32(tok[2], line_no, "d");
        section = Section::kInitStart;
        break;
      case Section::kInitStart:
        if (tok.size() != 1 || tok[0] != "init") {
          throw CircuitParseError(line_no, "expected \"init\"");
        }
        section = Section::kInit;
        break;
      case Section::kInit:
        if (tok[0] == "logical") {
          if (saw_logical) throw CircuitParseError(line_no, "duplicate logical line");
          saw_logical = true;
          for (size_t i = 1; i < tok.size(); i++) {
            c.init.logical.push_back(detail::parse_u32(tok[i], line_no, "logical qubit"));
          }
        } else if (tok[0] == "hadamard") {
          if (saw_hadamard) throw CircuitParseError(line_no, "duplicate hadamard line");
          saw_hadamard = true;
          for (size_t i = 1; i < tok.size(); i++) {
            c.init.hadamard.push_back(detail::parse_u32(tok[i], line_no, "hadamard qubit"));
          }
        } else if (tok[0] == "bell") {
          if (tok.size() != 3) throw CircuitParseError(line_no, "bell needs two qubits");
          c.init.bell.emplace_back(detail::parse_u32(tok[1], line_no, "bell qubit"),
                                   detail::parse_u32(tok[2], line_no, "bell qubit"));
        } else if (tok[0] == "actions" && tok.size() == 1) {
          if (!saw_logical || !saw_hadamard) {
            throw CircuitParseError(line_no, "init block needs logical and hadamard lines");
          }
          section = Section::kActions;
        } else {
          throw CircuitParseError(line_no, "unexpected \"" + std::string(tok[0]) +
                                               "\" in init block");
        }
        break;
      case Section::kActions:
        if (tok.size() == 1 && tok[0] == "cx") {
          section = Section::kCx;
          break;
        }
        if (tok.size() != 3) {
          throw CircuitParseError(line_no, "action must be \"<level> <anchor> <A|B>\"");
        }
        try {
          c.actions.push_back({detail::parse_u32(tok[0], line_no, "level"),
                               detail::parse_u32(tok[1], line_no, "anchor"),
                               parse_orientation(tok[2])});
        } catch (const std::invalid_argument& e) {
          throw CircuitParseError(line_no, e.what());
        }
        break;
      case Section::kCx:
        if (tok.size() != 2) throw CircuitParseError(line_no, "cx gate must be \"<control> <target>\"");
        c.cx.push_back({detail::parse_u32(tok[0], line_no, "control"),
                        detail::parse_u32(tok[1], line_no, "target")});
        break;
    }
    if (end == text.size()) break;
  }
  if (section != Section::kCx) {
    throw CircuitParseError(line_no, "truncated circuit: missing init, actions or cx block");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CircuitParseError(0, e.what());
  }
  return c;
}

inline Circuit load_circuit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open circuit file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return read_circuit(buf.str());
  } catch (const CircuitParseError& e) {
    throw CircuitParseError(e.line(), e.message(), path);
  }
}

inline void save_circuit(const Circuit& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write circuit file " + path);
  out << write_circuit(c);
}

}  // namespace gadgetrl
