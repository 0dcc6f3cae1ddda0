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

#include <stdexcept>
#include <string>
#include <vector>

namespace mbell {

/// Default ceiling on the number of parties. Dense operators downstream have
/// side 2^n.
inline constexpr int kMaxParties = 12;

/// Party label as used on every public surface: 1 is Alice, j >= 2 is Bob j.
struct PartyLabel {
  int index = 1;

  [[nodiscard]] constexpr bool is_alice() const { return index == 1; }
  friend constexpr auto operator<=>(const PartyLabel&, const PartyLabel&) = default;
};

/// Strictly increasing list of Bob labels drawn from {2, ..., n}.
using OrderedSubset = std::vector<int>;

inline void require_party_count(int n, int max_n = kMaxParties) {
  if (n < 2) throw std::invalid_argument("party count must be at least 2, got " + std::to_string(n));
  if (n > max_n) {
    throw std::invalid_argument("party count " + std::to_string(n) + " exceeds cap " +
                                std::to_string(max_n));
  }
}

/// All strictly increasing l-subsets of the Bob labels {2, ..., n}, in
/// lexicographic order. There are C(n-1, l) of them.
inline std::vector<OrderedSubset> enumerate_subsets(int n, int l) {
  if (n < 2) throw std::invalid_argument("enumerate_subsets: n must be >= 2");
  if (l < 1 || l > n - 1) {
    throw std::invalid_argument("enumerate_subsets: subset size " + std::to_string(l) +
                                " outside [1, " + std::to_string(n - 1) + "]");
  }
  std::vector<OrderedSubset> out;
  OrderedSubset current(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) current[static_cast<std::size_t>(i)] = 2 + i;
  while (true) {
    out.push_back(current);
    // Advance the rightmost position that still has room.
    int pos = l - 1;
    while (pos >= 0 && current[static_cast<std::size_t>(pos)] == n - (l - 1 - pos)) --pos;
    if (pos < 0) break;
    ++current[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < l; ++i) {
      current[static_cast<std::size_t>(i)] = current[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return out;
}

}  // namespace mbell
