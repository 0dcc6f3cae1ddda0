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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mbell/polynomial.hpp"
#include "mbell/rational.hpp"

namespace mbell {

/// Strategy after mapping B0, B1 of every Bob to B- = (B0 - B1)/2.
struct ReducedStrategy {
  int a0 = 1;
  std::vector<int> bminus;  // values in {-1, 0, +1}, bminus[j - 2] for Bob j
};

struct BoundsReport {
  int n = 0;
  Rational max_value;
  Rational min_value;
  DeterministicStrategy argmax;
  DeterministicStrategy argmin;
  std::uint64_t strategies_checked = 0;
};

inline constexpr int kMaxExhaustiveParties = 10;
inline constexpr int kMaxReducedParties = 62;

namespace detail {

struct ExtremumScan {
  std::int64_t max_value = 0;
  std::int64_t min_value = 0;
  std::uint64_t argmax = 0;
  std::uint64_t argmin = 0;
  bool empty = true;

  void offer(std::int64_t v, std::uint64_t idx) {
    if (empty) {
      max_value = min_value = v;
      argmax = argmin = idx;
      empty = false;
      return;
    }
    // Strict comparisons: the first (lowest) index keeps a tie.
    if (v > max_value) {
      max_value = v;
      argmax = idx;
    }
    if (v < min_value) {
      min_value = v;
      argmin = idx;
    }
  }

  /// Associative merge; ties resolve to the lower strategy index.
  void merge(const ExtremumScan& o) {
    if (o.empty) return;
    if (empty) {
      *this = o;
      return;
    }
    if (o.max_value > max_value || (o.max_value == max_value && o.argmax < argmax)) {
      max_value = o.max_value;
      argmax = o.argmax;
    }
    if (o.min_value < min_value || (o.min_value == min_value && o.argmin < argmin)) {
      min_value = o.min_value;
      argmin = o.argmin;
    }
  }
};

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Scans all 2^(2n) deterministic strategies of build_bell(n).
///
/// Strategies are indexed as 2n-bit integers (see
/// DeterministicStrategy::from_bits) and the lowest index wins ties. Index
/// ranges are split across `workers` threads; 0 picks the hardware count.
inline BoundsReport classical_bounds_exhaustive(int n, unsigned workers = 0) {
  if (n < 2 || n > kMaxExhaustiveParties) {
    throw std::invalid_argument("classical_bounds_exhaustive: n must be in [2, " +
                                std::to_string(kMaxExhaustiveParties) + "], got " +
                                std::to_string(n));
  }
  const CompiledPolynomial compiled(build_bell(n));
  const std::uint64_t total = std::uint64_t{1} << (2 * n);

  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));
  std::vector<detail::ExtremumScan> partial(workers);
  auto scan = [&](unsigned w) {
    const std::uint64_t begin = total * w / workers;
    const std::uint64_t end = total * (w + 1) / workers;
    for (std::uint64_t idx = begin; idx < end; ++idx) partial[w].offer(compiled.scaled_value(idx), idx);
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
  }
  detail::ExtremumScan result;
  for (const auto& p : partial) result.merge(p);

  BoundsReport report;
  report.n = n;
  report.max_value = Rational(result.max_value, compiled.denominator());
  report.min_value = Rational(result.min_value, compiled.denominator());
  report.argmax = DeterministicStrategy::from_bits(n, result.argmax);
  report.argmin = DeterministicStrategy::from_bits(n, result.argmin);
  report.strategies_checked = total;
  return report;
}

/// Value of the B- part of the correlator when q_plus Bobs have B- = +1,
/// q_minus have B- = -1 and the rest have B- = 0. Counts the signed products
/// over ordered subsets with Vandermonde-style convolutions instead of
/// enumerating them.
inline std::int64_t bminus_part_value(int n, int q_plus, int q_minus, int a0) {
  using detail::binomial;
  const int q = q_plus + q_minus;
  if (q_plus < 0 || q_minus < 0 || q > n - 1) throw std::invalid_argument("bminus_part_value: bad counts");
  std::int64_t value = 0;
  if (n % 2 == 0 && q == n - 1) value -= a0 * (q_minus % 2 == 0 ? 1 : -1);
  for (int k = 1; k <= (n - 1) / 2; ++k) {
    std::int64_t odd = 0;
    for (int r = 0; r <= 2 * k - 1; ++r) {
      odd += (r % 2 == 0 ? 1 : -1) * binomial(q_plus, 2 * k - 1 - r) * binomial(q_minus, r);
    }
    std::int64_t even = 0;
    for (int r = 0; r <= 2 * k; ++r) {
      even += (r % 2 == 0 ? 1 : -1) * binomial(q_plus, 2 * k - r) * binomial(q_minus, r);
    }
    value -= a0 * odd + even;
  }
  return value;
}

/// Extremes over Bob-permutation classes only.
///
/// A class is (q+, q-, sign): q+ Bobs with B- = +1, q- with B- = -1. For
/// q+ + q- > 0 every B+ product vanishes and the sign is A0. For q+ = q- = 0 the
/// B- part vanishes instead, A0 is irrelevant and the sign is that of
/// A1 prod B+. That gives n(n+1) classes in total.
inline BoundsReport classical_bounds_reduced(int n) {
  if (n < 2 || n > kMaxReducedParties) {
    throw std::invalid_argument("classical_bounds_reduced: n must be in [2, " +
                                std::to_string(kMaxReducedParties) + "], got " + std::to_string(n));
  }
  auto representative = [n](int q_plus, int q_minus, int sign) {
    DeterministicStrategy s;
    const bool trivial = q_plus + q_minus == 0;
    s.alice = {trivial ? 1 : sign, trivial ? sign : 1};
    for (int j = 0; j < n - 1; ++j) {
      if (j < q_plus) {
        s.bobs.push_back({1, -1});
      } else if (j < q_plus + q_minus) {
        s.bobs.push_back({-1, 1});
      } else {
        s.bobs.push_back({1, 1});
      }
    }
    return s;
  };

  BoundsReport report;
  report.n = n;
  bool first = true;
  std::int64_t best_max = 0;
  std::int64_t best_min = 0;
  for (int q = 0; q <= n - 1; ++q) {
    for (int q_plus = 0; q_plus <= q; ++q_plus) {
      const int q_minus = q - q_plus;
      for (int sign : {1, -1}) {
        const std::int64_t v = q == 0 ? sign : bminus_part_value(n, q_plus, q_minus, sign);
        ++report.strategies_checked;
        if (first || v > best_max) {
          best_max = v;
          report.argmax = representative(q_plus, q_minus, sign);
        }
        if (first || v < best_min) {
          best_min = v;
          report.argmin = representative(q_plus, q_minus, sign);
        }
        first = false;
      }
    }
  }
  report.max_value = Rational(best_max);
  report.min_value = Rational(best_min);
  return report;
}

/// Maps a deterministic strategy to (A0, B-) values.
inline ReducedStrategy reduce_strategy(const DeterministicStrategy& s) {
  ReducedStrategy r;
  r.a0 = s.alice.v0;
  for (const auto& b : s.bobs) r.bminus.push_back((b.v0 - b.v1) / 2);
  return r;
}

}  // namespace mbell
