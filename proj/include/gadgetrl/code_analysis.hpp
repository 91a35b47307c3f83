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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gadgetrl/symplectic.hpp"
#include "gadgetrl/tableau.hpp"

namespace gadgetrl {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binomial(size_t n, size_t k) {
  if (k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  BigInt result = 1;
  for (size_t i = 1; i <= k; i++) {
    result = result * (n - k + i) / i;
  }
  return result;
}

/// Number of pure-X Pauli strings of weight 0..d-1 on n qubits (identity included).
inline BigInt css_error_count_per_type(size_t n, size_t d) {
  BigInt total = 0;
  for (size_t w = 0; w < d && w <= n; w++) {
    total += binomial(n, w);
  }
  return total;
}

enum class PauliType : uint8_t { kX, kZ };

inline char type_letter(PauliType t) { return t == PauliType::kX ? 'X' : 'Z'; }

/// All pure-X and pure-Z Pauli strings of weight 1..d-1 with weights
/// lambda = p^weight. Supports are stored flat.
class ErrorSet {
 public:
  struct Entry {
    PauliType type;
    uint32_t weight;
    uint32_t support_begin;
    double lambda;
  };

  ErrorSet() = default;

  static ErrorSet enumerate(size_t n, size_t d, double p = 0.1) {
    if (n == 0) {
      throw std::invalid_argument("error set needs at least one qubit");
    }
    if (d < 1 || d > n) {
      throw std::invalid_argument("distance " + std::to_string(d) + " outside [1, n=" +
                                  std::to_string(n) + "]");
    }
    if (!(p > 0)) {
      throw std::invalid_argument("error rate p must be positive");
    }
    ErrorSet es;
    es.n_ = n;
    es.d_ = d;
    es.p_ = p;
    for (PauliType type : {PauliType::kX, PauliType::kZ}) {
      for (size_t w = 1; w < d; w++) {
        double lambda = std::pow(p, static_cast<double>(w));
        std::vector<uint32_t> combo(w);
        for (size_t i = 0; i < w; i++) {
          combo[i] = static_cast<uint32_t>(i);
        }
        while (true) {
          es.entries_.push_back({type, static_cast<uint32_t>(w),
                                 static_cast<uint32_t>(es.supports_.size()), lambda});
          es.supports_.insert(es.supports_.end(), combo.begin(), combo.end());
          // Advance to the next combination in lexicographic order.
          size_t i = w;
          while (i > 0 && combo[i - 1] == n - w + i - 1) {
            i--;
          }
          if (i == 0) {
            break;
          }
          combo[i - 1]++;
          for (size_t j = i; j < w; j++) {
            combo[j] = combo[j - 1] + 1;
          }
        }
      }
    }
    return es;
  }

  size_t num_qubits() const { return n_; }
  size_t distance() const { return d_; }
  double error_rate() const { return p_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& entry(size_t i) const { return entries_[i]; }
  std::span<const uint32_t> support(size_t i) const {
    const auto& e = entries_[i];
    return std::span<const uint32_t>(supports_).subspan(e.support_begin, e.weight);
  }

  size_t count(PauliType type) const {
    return static_cast<size_t>(std::count_if(entries_.begin(), entries_.end(),
                                             [&](const Entry& e) { return e.type == type; }));
  }

  PauliString pauli(size_t i) const {
    PauliString p(n_);
    for (uint32_t q : support(i)) {
      if (entries_[i].type == PauliType::kX) {
        p.xs().set(q, true);
      } else {
        p.zs().set(q, true);
      }
    }
    return p;
  }

  /// Keeps only the listed indices (order preserved).
  ErrorSet subset(std::span<const size_t> keep) const {
    ErrorSet out;
    out.n_ = n_;
    out.d_ = d_;
    out.p_ = p_;
    for (size_t i : keep) {
      Entry e = entries_.at(i);
      auto s = support(i);
      e.support_begin = static_cast<uint32_t>(out.supports_.size());
      out.supports_.insert(out.supports_.end(), s.begin(), s.end());
      out.entries_.push_back(e);
    }
    return out;
  }

 private:
  size_t n_ = 0;
  size_t d_ = 0;
  double p_ = 0.1;
  std::vector<Entry> entries_;
  std::vector<uint32_t> supports_;
};

/// Precomputed syndrome columns and row-space basis for one tableau.
///
/// Column q of the X-error table is the bitmask over generators whose Z part
/// touches q; the syndrome of a pure-X error is the XOR of its columns. The
/// echelon basis for the degenerate (row-space) test is built on first use.
class DetectionContext {
 public:
  explicit DetectionContext(const StabilizerTableau& t)
      : tableau_(&t), n_(t.num_qubits()), row_words_(BitVector::word_count(t.num_rows())) {
    x_columns_.assign(n_ * row_words_, 0);
    z_columns_.assign(n_ * row_words_, 0);
    for (size_t r = 0; r < t.num_rows(); r++) {
      const auto& row = t.row(r);
      uint64_t bit = uint64_t{1} << (r & 63);
      size_t word = r >> 6;
      for (size_t q = 0; q < n_; q++) {
        if (row.z(q)) {
          x_columns_[q * row_words_ + word] |= bit;
        }
        if (row.x(q)) {
          z_columns_[q * row_words_ + word] |= bit;
        }
      }
    }
  }

  size_t num_qubits() const { return n_; }

  /// True iff the pure error anticommutes with some generator.
  bool has_syndrome(PauliType type, std::span<const uint32_t> support) const {
    const auto& cols = type == PauliType::kX ? x_columns_ : z_columns_;
    if (row_words_ == 1) {
      uint64_t acc = 0;
      for (uint32_t q : support) {
        acc ^= cols[q];
      }
      return acc != 0;
    }
    for (size_t w = 0; w < row_words_; w++) {
      uint64_t acc = 0;
      for (uint32_t q : support) {
        acc ^= cols[q * row_words_ + w];
      }
      if (acc) {
        return true;
      }
    }
    return false;
  }

  /// True iff the pure error lies in the GF(2) span of the generators.
  bool in_row_space(PauliType type, std::span<const uint32_t> support) const {
    if (!basis_built_) {
      build_basis();
    }
    BitVector v(2 * n_);
    size_t offset = type == PauliType::kX ? 0 : n_;
    for (uint32_t q : support) {
      v.set(offset + q, true);
    }
    return reduces_to_zero(v);
  }

  bool is_detectable(PauliType type, std::span<const uint32_t> support) const {
    return has_syndrome(type, support) || in_row_space(type, support);
  }

  bool is_detectable(const PauliString& e) const {
    if (e.num_qubits() != n_) {
      throw std::invalid_argument("error and tableau act on different qubit counts");
    }
    if (!e.is_x_type() && !e.is_z_type()) {
      // General Pauli: direct anticommutation scan, then row-space test.
      for (const auto& row : tableau_->rows()) {
        if (!commutes(row, e)) {
          return true;
        }
      }
      if (!basis_built_) {
        build_basis();
      }
      BitVector v(2 * n_);
      for (size_t q = 0; q < n_; q++) {
        v.set(q, e.x(q));
        v.set(n_ + q, e.z(q));
      }
      return reduces_to_zero(v);
    }
    PauliType type = e.is_z_type() && e.zs().any() ? PauliType::kZ : PauliType::kX;
    const BitVector& bits = type == PauliType::kX ? e.xs() : e.zs();
    std::vector<uint32_t> support;
    for (size_t q = 0; q < n_; q++) {
      if (bits[q]) {
        support.push_back(static_cast<uint32_t>(q));
      }
    }
    return is_detectable(type, support);
  }

 private:
  void build_basis() const {
    basis_ = tableau_->symplectic_matrix();
    gf2_rref(basis_);
    pivots_.clear();
    for (const auto& row : basis_) {
      pivots_.push_back(row.first_set());
    }
    basis_built_ = true;
  }

  bool reduces_to_zero(BitVector& v) const {
    for (size_t i = 0; i < basis_.size(); i++) {
      if (v[pivots_[i]]) {
        v ^= basis_[i];
      }
    }
    return !v.any();
  }

  const StabilizerTableau* tableau_;
  size_t n_;
  size_t row_words_;
  std::vector<uint64_t> x_columns_;
  std::vector<uint64_t> z_columns_;
  mutable bool basis_built_ = false;
  mutable BinaryMatrix basis_;
  mutable std::vector<size_t> pivots_;
};

/// Detectable iff e anticommutes with a generator or lies in the stabilizer
/// row space (degenerate errors act trivially on the code space).
inline bool is_detectable(const StabilizerTableau& t, const PauliString& e) {
  return DetectionContext(t).is_detectable(e);
}

struct WeightBreakdown {
  PauliType type;
  size_t weight = 0;
  size_t total = 0;
  size_t undetected = 0;
  double sigma = 0;
};

struct KLReport {
  double sigma_kl = 0;
  std::vector<size_t> undetected;
  std::vector<WeightBreakdown> per_weight;
};

namespace detail {

inline std::vector<uint8_t> undetected_flags(const StabilizerTableau& t, const ErrorSet& es,
                                             size_t workers) {
  if (t.num_qubits() != es.num_qubits()) {
    throw std::invalid_argument("tableau and error set have different qubit counts");
  }
  DetectionContext ctx(t);
  std::vector<uint8_t> flags(es.size(), 0);
  auto run = [&](const DetectionContext& c, size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++) {
      flags[i] = !c.is_detectable(es.entry(i).type, es.support(i));
    }
  };
  workers = std::max<size_t>(1, std::min(workers, es.size() / 4096 + 1));
  if (workers == 1) {
    run(ctx, 0, es.size());
    return flags;
  }
  std::vector<std::thread> pool;
  size_t chunk = (es.size() + workers - 1) / workers;
  for (size_t w = 0; w < workers; w++) {
    size_t begin = w * chunk;
    size_t end = std::min(es.size(), begin + chunk);
    // Each worker owns its context: the lazily built basis is not shared.
    pool.emplace_back([&, begin, end] {
      DetectionContext local(t);
      run(local, begin, end);
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  return flags;
}

}  // namespace detail

/// Sigma_KL only, summed in index order.
inline double sigma_kl(const StabilizerTableau& t, const ErrorSet& es) {
  if (t.num_qubits() != es.num_qubits()) {
    throw std::invalid_argument("tableau and error set have different qubit counts");
  }
  DetectionContext ctx(t);
  double total = 0;
  for (size_t i = 0; i < es.size(); i++) {
    const auto& e = es.entry(i);
    if (!ctx.is_detectable(e.type, es.support(i))) {
      total += e.lambda;
    }
  }
  return total;
}

/// Sigma_KL = sum_mu lambda_mu K_mu. Detection bits may be computed by several
/// workers; the sum is always reduced in index order.
inline KLReport kl_sum(const StabilizerTableau& t, const ErrorSet& es, size_t workers = 1) {
  auto flags = detail::undetected_flags(t, es, workers);
  KLReport report;
  for (size_t i = 0; i < es.size(); i++) {
    const auto& e = es.entry(i);
    if (report.per_weight.empty() || report.per_weight.back().type != e.type ||
        report.per_weight.back().weight != e.weight) {
      report.per_weight.push_back({e.type, e.weight, 0, 0, 0});
    }
    auto& bucket = report.per_weight.back();
    bucket.total++;
    if (flags[i]) {
      report.sigma_kl += e.lambda;
      report.undetected.push_back(i);
      bucket.undetected++;
      bucket.sigma += e.lambda;
    }
  }
  return report;
}

enum class DistanceStatus { kPass, kFail, kInfeasible };

inline const char* to_string(DistanceStatus s) {
  switch (s) {
    case DistanceStatus::kPass:
      return "PASS";
    case DistanceStatus::kFail:
      return "FAIL";
    case DistanceStatus::kInfeasible:
      return "INFEASIBLE";
  }
  return "?";
}

struct DistanceCheck {
  DistanceStatus status = DistanceStatus::kInfeasible;
  size_t errors_checked = 0;
  std::vector<PauliString> witnesses;  ///< undetected errors, capped
};

constexpr size_t kDefaultDistanceBudget = 50'000'000;

/// Checks that every pure-X and pure-Z Pauli of weight <= d-1 is detectable.
/// For CSS codes this is exactly distance >= d.
inline DistanceCheck verify_distance(const StabilizerTableau& t, size_t d,
                                     size_t budget = kDefaultDistanceBudget,
                                     size_t max_witnesses = 16) {
  DistanceCheck check;
  size_t n = t.num_qubits();
  if (d <= 1) {
    check.status = DistanceStatus::kPass;
    return check;
  }
  BigInt needed = 2 * (css_error_count_per_type(n, d) - 1);
  if (needed > budget) {
    check.status = DistanceStatus::kInfeasible;
    return check;
  }
  // enumerate(n, n) stops at weight n-1; a d > n request adds weight n below.
  ErrorSet es = ErrorSet::enumerate(n, std::min(d, n));
  DetectionContext ctx(t);
  check.status = DistanceStatus::kPass;
  for (size_t i = 0; i < es.size(); i++) {
    check.errors_checked++;
    if (!ctx.is_detectable(es.entry(i).type, es.support(i))) {
      check.status = DistanceStatus::kFail;
      if (check.witnesses.size() < max_witnesses) {
        check.witnesses.push_back(es.pauli(i));
      }
    }
  }
  if (d > n) {
    // Weight-n errors.
    for (PauliType type : {PauliType::kX, PauliType::kZ}) {
      PauliString e(n);
      for (size_t q = 0; q < n; q++) {
        (type == PauliType::kX ? e.xs() : e.zs()).set(q, true);
      }
      check.errors_checked++;
      if (!ctx.is_detectable(e)) {
        check.status = DistanceStatus::kFail;
        if (check.witnesses.size() < max_witnesses) {
          check.witnesses.push_back(e);
        }
      }
    }
  }
  return check;
}

/// Throws when the combinatorial budget is exceeded instead of returning
/// kInfeasible.
inline bool verify_distance_at_least(const StabilizerTableau& t, size_t d,
                                     size_t budget = kDefaultDistanceBudget) {
  auto check = verify_distance(t, d, budget, 0);
  if (check.status == DistanceStatus::kInfeasible) {
    throw std::runtime_error("distance check infeasible: error count exceeds budget of " +
                             std::to_string(budget));
  }
  return check.status == DistanceStatus::kPass;
}

enum class QhbVariant { kStabilizer, kSelfDualCss };

struct QhbResult {
  size_t t = 0;
  bool even_distance = false;  ///< t taken as floor((d-1)/2)
  BigInt lhs;                  ///< syndrome count
  BigInt rhs;                  ///< error pattern count
  bool satisfied = false;
  bool perfect = false;
};

/// Quantum Hamming bound. Stabilizer: 2^(n-k) >= sum_j 3^j C(n,j); weakly
/// self-dual CSS: 2^floor((n-k)/2) >= sum_j C(n,j); j runs to t = floor((d-1)/2).
inline QhbResult qhb(size_t n, size_t k, size_t d, QhbVariant variant) {
  if (k > n) {
    throw std::invalid_argument("k exceeds n");
  }
  if (d == 0) {
    throw std::invalid_argument("distance must be at least 1");
  }
  QhbResult r;
  r.t = (d - 1) / 2;
  r.even_distance = d % 2 == 0;
  size_t exponent = variant == QhbVariant::kStabilizer ? n - k : (n - k) / 2;
  r.lhs = BigInt(1) << exponent;
  r.rhs = 0;
  BigInt power = 1;
  for (size_t j = 0; j <= r.t && j <= n; j++) {
    r.rhs += (variant == QhbVariant::kStabilizer ? power : BigInt(1)) * binomial(n, j);
    power *= 3;
  }
  r.satisfied = r.lhs >= r.rhs;
  r.perfect = r.lhs == r.rhs;
  return r;
}

struct WeightStats {
  size_t count = 0;
  size_t min = 0;
  size_t max = 0;
  double mean = 0;
  double stddev = 0;  ///< population standard deviation
};

inline WeightStats weight_stats(std::span<const size_t> weights) {
  WeightStats s;
  s.count = weights.size();
  if (weights.empty()) {
    return s;
  }
  s.min = *std::min_element(weights.begin(), weights.end());
  s.max = *std::max_element(weights.begin(), weights.end());
  double sum = 0;
  for (size_t w : weights) {
    sum += static_cast<double>(w);
  }
  s.mean = sum / static_cast<double>(weights.size());
  double var = 0;
  for (size_t w : weights) {
    double dev = static_cast<double>(w) - s.mean;
    var += dev * dev;
  }
  s.stddev = std::sqrt(var / static_cast<double>(weights.size()));
  return s;
}

inline std::vector<size_t> row_weights(const StabilizerTableau& t) {
  std::vector<size_t> w;
  for (const auto& row : t.rows()) {
    w.push_back(weight(row));
  }
  return w;
}

inline WeightStats weight_stats(const StabilizerTableau& t) {
  auto w = row_weights(t);
  return weight_stats(std::span<const size_t>(w));
}

}  // namespace gadgetrl
