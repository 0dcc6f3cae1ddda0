// Copyright 2026 The mbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbell/rational.hpp"
#include "mbell/scenario.hpp"

namespace mbell {

/// One observable of one party: party label (1 = Alice) and input bit.
struct Factor {
  int party = 1;
  int input = 0;

  friend constexpr auto operator<=>(const Factor&, const Factor&) = default;
};

/// "A0", "A1", "B0" or "B1".
inline std::string observable_symbol(const Factor& f) {
  return std::string(f.party == 1 ? "A" : "B") + std::to_string(f.input);
}

/// Product of observables of distinct parties, sorted by party. Empty is the
/// identity.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::sort(factors_.begin(), factors_.end());
    for (std::size_t i = 1; i < factors_.size(); ++i) {
      if (factors_[i].party == factors_[i - 1].party) {
        throw std::invalid_argument("Monomial: party " + std::to_string(factors_[i].party) +
                                    " appears twice");
      }
    }
    for (const auto& f : factors_) {
      if (f.party < 1 || f.input < 0 || f.input > 1) {
        throw std::invalid_argument("Monomial: bad factor");
      }
    }
  }

  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
  [[nodiscard]] bool is_identity() const { return factors_.empty(); }
  [[nodiscard]] std::size_t degree() const { return factors_.size(); }

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Deterministic local strategy: a +-1 value for every observable.
struct DeterministicStrategy {
  struct Pair {
    int v0 = 1;
    int v1 = 1;
    friend constexpr bool operator==(const Pair&, const Pair&) = default;
  };
  Pair alice;
  std::vector<Pair> bobs;  // bobs[j - 2] belongs to Bob j

  [[nodiscard]] int party_count() const { return 1 + static_cast<int>(bobs.size()); }

  [[nodiscard]] int value(const Factor& f) const {
    if (f.party < 1 || f.party > party_count()) {
      throw std::out_of_range("DeterministicStrategy: no assignment for party " +
                              std::to_string(f.party));
    }
    const Pair& p = f.party == 1 ? alice : bobs[static_cast<std::size_t>(f.party - 2)];
    const int v = f.input == 0 ? p.v0 : p.v1;
    if (v != 1 && v != -1) throw std::invalid_argument("DeterministicStrategy: values must be +-1");
    return v;
  }

  /// Bit 2(p-1)+x is set when observable x of party p takes the value -1.
  static DeterministicStrategy from_bits(int n, std::uint64_t bits) {
    DeterministicStrategy s;
    auto val = [&](int bit) { return ((bits >> bit) & 1U) != 0 ? -1 : 1; };
    s.alice = {val(0), val(1)};
    for (int j = 2; j <= n; ++j) s.bobs.push_back({val(2 * (j - 1)), val(2 * (j - 1) + 1)});
    return s;
  }

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

/// Multilinear polynomial in the party observables with exact coefficients.
///
/// The term map is kept free of zero coefficients and ordered by monomial, so
/// two polynomials are equal exactly when their canonical forms coincide.
class BellPolynomial {
 public:
  using TermMap = std::map<Monomial, Rational>;

  BellPolynomial() = default;
  explicit BellPolynomial(int parties) : parties_(parties) {
    if (parties < 1) throw std::invalid_argument("BellPolynomial: party count must be positive");
  }

  [[nodiscard]] int party_count() const { return parties_; }
  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

  void add(const Monomial& m, const Rational& c) {
    for (const auto& f : m.factors()) {
      if (f.party > parties_) {
        throw std::out_of_range("BellPolynomial: party " + std::to_string(f.party) +
                                " outside 1.." + std::to_string(parties_));
      }
    }
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  [[nodiscard]] Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational{} : it->second;
  }

  BellPolynomial& operator+=(const BellPolynomial& o) {
    if (o.parties_ != parties_) throw std::invalid_argument("BellPolynomial: party count mismatch");
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }

  [[nodiscard]] BellPolynomial scaled(const Rational& s) const {
    BellPolynomial out(parties_);
    for (const auto& [m, c] : terms_) out.add(m, c * s);
    return out;
  }

  friend bool operator==(const BellPolynomial&, const BellPolynomial&) = default;

 private:
  int parties_ = 1;
  TermMap terms_;
};

/// Rebuilds the polynomial term by term. The map representation is already
/// canonical, so this is the identity on valid inputs.
inline BellPolynomial canonicalize(const BellPolynomial& p) {
  BellPolynomial out(p.party_count());
  for (const auto& [m, c] : p.terms()) out.add(Monomial(m.factors()), c);
  return out;
}

namespace detail {

/// A single-party linear form sum_x w_x O_x (or identity when empty).
struct LinearForm {
  int party;
  std::vector<std::pair<int, Rational>> weights;  // (input, weight)
};

inline LinearForm plus_form(int party) { return {party, {{0, Rational(1, 2)}, {1, Rational(1, 2)}}}; }
inline LinearForm minus_form(int party) { return {party, {{0, Rational(1, 2)}, {1, Rational(-1, 2)}}}; }
inline LinearForm single(int party, int input) { return {party, {{input, Rational(1)}}}; }

/// Expands coeff * prod(forms) into `out`. Each form belongs to a distinct party.
inline void expand_product(BellPolynomial& out, const std::vector<LinearForm>& forms,
                           const Rational& coeff) {
  std::vector<Factor> factors;
  factors.reserve(forms.size());
  auto rec = [&](auto&& self, std::size_t i, const Rational& c) -> void {
    if (i == forms.size()) {
      out.add(Monomial(factors), c);
      return;
    }
    for (const auto& [input, w] : forms[i].weights) {
      factors.push_back({forms[i].party, input});
      self(self, i + 1, c * w);
      factors.pop_back();
    }
  };
  rec(rec, 0, coeff);
}

}  // namespace detail

/// Builds the n-party correlator fully expanded into A0, A1, B0, B1 monomials.
///
/// Terms: the A1 (x) prod_j B+^(j) correlator, the A0 (x) prod_j B-^(j)
/// correlator for even n, and for k = 1..floor((n-1)/2) the sums over ordered
/// Bob subsets of size 2k-1 (with A0) and 2k (without Alice) of B- products,
/// where B+- = (B0 +- B1)/2.
inline BellPolynomial build_bell(int n) {
  if (n < 2) throw std::invalid_argument("build_bell: n must be >= 2, got " + std::to_string(n));
  if (n > 20) throw std::invalid_argument("build_bell: expansion too large for n > 20");
  using detail::LinearForm;
  BellPolynomial poly(n);

  std::vector<LinearForm> forms{detail::single(1, 1)};
  for (int j = 2; j <= n; ++j) forms.push_back(detail::plus_form(j));
  detail::expand_product(poly, forms, Rational(1));

  if (n % 2 == 0) {
    forms = {detail::single(1, 0)};
    for (int j = 2; j <= n; ++j) forms.push_back(detail::minus_form(j));
    detail::expand_product(poly, forms, Rational(-1));
  }

  for (int k = 1; k <= (n - 1) / 2; ++k) {
    for (const auto& subset : enumerate_subsets(n, 2 * k - 1)) {
      forms = {detail::single(1, 0)};
      for (int j : subset) forms.push_back(detail::minus_form(j));
      detail::expand_product(poly, forms, Rational(-1));
    }
    for (const auto& subset : enumerate_subsets(n, 2 * k)) {
      forms.clear();
      for (int j : subset) forms.push_back(detail::minus_form(j));
      detail::expand_product(poly, forms, Rational(-1));
    }
  }
  return poly;
}

/// Sets both observables of Bob j to the identity and relabels the Bobs above
/// j down by one.
inline BellPolynomial reduce_party(const BellPolynomial& poly, int j) {
  if (j < 2 || j > poly.party_count()) {
    throw std::out_of_range("reduce_party: unknown Bob label " + std::to_string(j));
  }
  BellPolynomial out(poly.party_count() - 1);
  for (const auto& [m, c] : poly.terms()) {
    std::vector<Factor> kept;
    for (const auto& f : m.factors()) {
      if (f.party == j) continue;
      kept.push_back({f.party > j ? f.party - 1 : f.party, f.input});
    }
    out.add(Monomial(std::move(kept)), c);
  }
  return out;
}

/// Replaces observable `from` of `party` by observable `to` of the same party.
inline BellPolynomial substitute_input(const BellPolynomial& poly, int party, int from, int to) {
  if (party < 1 || party > poly.party_count()) {
    throw std::out_of_range("substitute_input: unknown party " + std::to_string(party));
  }
  BellPolynomial out(poly.party_count());
  for (const auto& [m, c] : poly.terms()) {
    std::vector<Factor> fs = m.factors();
    for (auto& f : fs) {
      if (f.party == party && f.input == from) f.input = to;
    }
    out.add(Monomial(std::move(fs)), c);
  }
  return out;
}

/// Relabels Bobs: Bob j becomes Bob perm[j - 2]. `perm` is a permutation of
/// {2, ..., n}.
inline BellPolynomial permute_bobs(const BellPolynomial& poly, const std::vector<int>& perm) {
  const int n = poly.party_count();
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  std::vector<int> expected(static_cast<std::size_t>(n - 1));
  std::iota(expected.begin(), expected.end(), 2);
  if (check != expected) throw std::invalid_argument("permute_bobs: not a permutation of the Bobs");
  BellPolynomial out(n);
  for (const auto& [m, c] : poly.terms()) {
    std::vector<Factor> fs = m.factors();
    for (auto& f : fs) {
      if (f.party >= 2) f.party = perm[static_cast<std::size_t>(f.party - 2)];
    }
    out.add(Monomial(std::move(fs)), c);
  }
  return out;
}

/// Parity-CHSH polynomial: A1 (B0+B1)/2 of Bob 2 times B^(j) of every other
/// Bob, minus A0 (B0-B1)/2 of Bob 2. The single observable of Bob j >= 3 is
/// encoded as its input 0.
inline BellPolynomial parity_chsh(int n) {
  if (n < 3) throw std::invalid_argument("parity_chsh: n must be >= 3, got " + std::to_string(n));
  BellPolynomial poly(n);
  std::vector<detail::LinearForm> forms{detail::single(1, 1), detail::plus_form(2)};
  for (int j = 3; j <= n; ++j) forms.push_back(detail::single(j, 0));
  detail::expand_product(poly, forms, Rational(1));
  detail::expand_product(poly, {detail::single(1, 0), detail::minus_form(2)}, Rational(-1));
  return poly;
}

/// Exact value of the polynomial under a deterministic strategy.
inline Rational evaluate_classical(const BellPolynomial& poly, const DeterministicStrategy& s) {
  Rational total;
  for (const auto& [m, c] : poly.terms()) {
    int sign = 1;
    for (const auto& f : m.factors()) sign *= s.value(f);
    total += sign == 1 ? c : -c;
  }
  return total;
}

/// Integer-scaled copy of a polynomial for evaluating many strategies quickly.
///
/// Every coefficient is brought to the common denominator; a strategy is a bit
/// mask (see DeterministicStrategy::from_bits) and the sign of a monomial is the
/// parity of the overlap between its mask and the strategy mask.
class CompiledPolynomial {
 public:
  explicit CompiledPolynomial(const BellPolynomial& poly) : parties_(poly.party_count()) {
    if (parties_ > 32) throw std::invalid_argument("CompiledPolynomial: too many parties");
    for (const auto& [m, c] : poly.terms()) {
      den_ = std::lcm(den_, c.den());
    }
    for (const auto& [m, c] : poly.terms()) {
      std::uint64_t mask = 0;
      for (const auto& f : m.factors()) mask |= std::uint64_t{1} << (2 * (f.party - 1) + f.input);
      masks_.push_back(mask);
      weights_.push_back(c.num() * (den_ / c.den()));
    }
  }

  [[nodiscard]] int party_count() const { return parties_; }
  [[nodiscard]] std::int64_t denominator() const { return den_; }

  /// Value times the common denominator.
  [[nodiscard]] std::int64_t scaled_value(std::uint64_t strategy_bits) const {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < masks_.size(); ++i) {
      total += (std::popcount(masks_[i] & strategy_bits) & 1) != 0 ? -weights_[i] : weights_[i];
    }
    return total;
  }

  [[nodiscard]] Rational value(std::uint64_t strategy_bits) const {
    return Rational(scaled_value(strategy_bits), den_);
  }

 private:
  int parties_;
  std::int64_t den_ = 1;
  std::vector<std::uint64_t> masks_;
  std::vector<std::int64_t> weights_;
};

}  // namespace mbell
