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

#include <gtest/gtest.h>

#include <stdexcept>

#include "mbell/io.hpp"
#include "mbell/polynomial.hpp"

namespace mbell {
namespace {

Monomial mono(std::initializer_list<Factor> fs) { return Monomial(std::vector<Factor>(fs)); }

TEST(Monomial, RejectsRepeatedParty) {
  EXPECT_THROW(mono({{1, 0}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(mono({{1, 2}}), std::invalid_argument);
}

TEST(Monomial, FactorsAreSorted) {
  EXPECT_EQ(mono({{3, 1}, {1, 0}}), mono({{1, 0}, {3, 1}}));
}

TEST(BuildBell, TwoPartiesIsHalfChsh) {
  const BellPolynomial b = build_bell(2);
  ASSERT_EQ(b.size(), 4u);
  int negative = 0;
  for (const auto& [m, c] : b.terms()) {
    EXPECT_EQ(m.degree(), 2u);
    EXPECT_EQ(c.den(), 2);
    EXPECT_EQ(std::abs(c.num()), 1);
    negative += c.num() < 0;
  }
  EXPECT_EQ(negative, 1);
  // A1 B+ - A0 B-
  EXPECT_EQ(b.coefficient(mono({{1, 0}, {2, 0}})), Rational(-1, 2));
  EXPECT_EQ(b.coefficient(mono({{1, 0}, {2, 1}})), Rational(1, 2));
}

TEST(BuildBell, ThreePartiesMatchesDisplayedForm) {
  // A1 B+ C+ - A0 (B- + C-) - B- C- expanded by hand.
  BellPolynomial expected(3);
  const Rational q(1, 4);
  const Rational h(1, 2);
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      expected.add(mono({{1, 1}, {2, y}, {3, z}}), q);
      const Rational sign = ((y == 1) != (z == 1)) ? Rational(1) : Rational(-1);
      expected.add(mono({{2, y}, {3, z}}), sign * q);
    }
    const Rational s = y == 0 ? -h : h;
    expected.add(mono({{1, 0}, {2, y}}), s);
    expected.add(mono({{1, 0}, {3, y}}), s);
  }
  EXPECT_EQ(build_bell(3), expected);
}

TEST(BuildBell, EvenPartyDeltaTermPresent) {
  // -A0 B-B-B- contributes -1/8 to A0 B0 B0 B0 and nothing else does.
  const BellPolynomial b = build_bell(4);
  EXPECT_EQ(b.coefficient(mono({{1, 0}, {2, 0}, {3, 0}, {4, 0}})), Rational(-1, 8));
  EXPECT_EQ(b.coefficient(mono({{1, 0}, {2, 1}, {3, 1}, {4, 1}})), Rational(1, 8));
  EXPECT_TRUE(build_bell(3).coefficient(mono({{1, 0}, {2, 0}, {3, 0}})).is_zero());
}

TEST(BuildBell, RejectsSmallN) { EXPECT_THROW(build_bell(1), std::invalid_argument); }

TEST(ReduceParty, DropsOneBob) {
  EXPECT_EQ(reduce_party(build_bell(4), 4), build_bell(3));
  EXPECT_EQ(reduce_party(reduce_party(build_bell(4), 4), 3), build_bell(2));
  EXPECT_EQ(reduce_party(build_bell(3), 2), build_bell(2));
  for (int n = 3; n <= 8; ++n) {
    for (int j = 2; j <= n; ++j) EXPECT_EQ(reduce_party(build_bell(n), j), build_bell(n - 1)) << n << " " << j;
  }
  EXPECT_THROW(reduce_party(build_bell(3), 1), std::out_of_range);
}

TEST(PermuteBobs, Invariance) {
  const BellPolynomial b = build_bell(4);
  EXPECT_EQ(permute_bobs(b, {4, 2, 3}), b);
  EXPECT_THROW(permute_bobs(b, {2, 2, 3}), std::invalid_argument);
}

TEST(ParityChsh, ThreeParties) {
  const BellPolynomial p = parity_chsh(3);
  EXPECT_EQ(p.size(), 4u);
  EXPECT_EQ(p.coefficient(mono({{1, 1}, {2, 0}, {3, 0}})), Rational(1, 2));
  EXPECT_EQ(p.coefficient(mono({{1, 1}, {2, 1}, {3, 0}})), Rational(1, 2));
  EXPECT_EQ(p.coefficient(mono({{1, 0}, {2, 0}})), Rational(-1, 2));
  EXPECT_EQ(p.coefficient(mono({{1, 0}, {2, 1}})), Rational(1, 2));
}

TEST(ParityChsh, RecoveredFromBell) {
  for (int n = 3; n <= 6; ++n) {
    BellPolynomial b = build_bell(n);
    for (int j = 3; j <= n; ++j) b = substitute_input(b, j, 1, 0);
    EXPECT_EQ(b, parity_chsh(n)) << n;
  }
}

TEST(ParityChsh, ReducesToChsh) {
  EXPECT_EQ(reduce_party(parity_chsh(3), 3), build_bell(2));
}

TEST(EvaluateClassical, Examples) {
  DeterministicStrategy all_plus = DeterministicStrategy::from_bits(3, 0);
  EXPECT_EQ(evaluate_classical(build_bell(3), all_plus), Rational(1));

  for (int a1 : {1, -1}) {
    DeterministicStrategy s;
    s.alice = {1, a1};
    s.bobs = {{1, -1}, {1, -1}};
    EXPECT_EQ(evaluate_classical(build_bell(3), s), Rational(-3));
  }
  DeterministicStrategy s4;
  s4.alice = {1, 1};
  s4.bobs = {{1, -1}, {1, -1}, {1, -1}};
  EXPECT_EQ(evaluate_classical(build_bell(4), s4), Rational(-7));
}

TEST(EvaluateClassical, MissingPartyThrows) {
  DeterministicStrategy s = DeterministicStrategy::from_bits(2, 0);
  EXPECT_THROW(evaluate_classical(build_bell(3), s), std::out_of_range);
}

TEST(CompiledPolynomial, AgreesWithExactEvaluation) {
  for (int n = 2; n <= 4; ++n) {
    const BellPolynomial b = build_bell(n);
    const CompiledPolynomial cp(b);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * n)); ++bits) {
      const Rational exact = evaluate_classical(b, DeterministicStrategy::from_bits(n, bits));
      EXPECT_EQ(Rational(cp.scaled_value(bits), cp.denominator()), exact);
    }
  }
}

TEST(Json, RoundTrip) {
  for (int n = 2; n <= 5; ++n) EXPECT_EQ(polynomial_from_json(to_json(build_bell(n))), build_bell(n));
  const auto j = to_json(build_bell(2));
  EXPECT_EQ(j.at("parties"), 2);
  EXPECT_EQ(j.at("terms").size(), 4u);
  EXPECT_EQ(j.at("terms")[0].at("den"), 2);
}

}  // namespace
}  // namespace mbell
