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

#include <algorithm>
#include <stdexcept>

#include "mbell/scenario.hpp"

namespace mbell {
namespace {

TEST(EnumerateSubsets, FourPartiesPairs) {
  const std::vector<OrderedSubset> expected{{2, 3}, {2, 4}, {3, 4}};
  EXPECT_EQ(enumerate_subsets(4, 2), expected);
}

TEST(EnumerateSubsets, Singletons) {
  const std::vector<OrderedSubset> expected{{2}, {3}};
  EXPECT_EQ(enumerate_subsets(3, 1), expected);
}

TEST(EnumerateSubsets, FivePartiesTriples) {
  const auto s = enumerate_subsets(5, 3);
  ASSERT_EQ(s.size(), 4u);  // C(4, 3): Bobs are {2, 3, 4, 5}
  EXPECT_EQ(s.front(), (OrderedSubset{2, 3, 4}));
  EXPECT_EQ(s.back(), (OrderedSubset{3, 4, 5}));
}

TEST(EnumerateSubsets, CountsAreBinomial) {
  for (int n = 2; n <= 12; ++n) {
    std::size_t total = 0;
    for (int l = 1; l <= n - 1; ++l) {
      const auto s = enumerate_subsets(n, l);
      total += s.size();
      for (const auto& sub : s) {
        ASSERT_EQ(sub.size(), static_cast<std::size_t>(l));
        for (std::size_t i = 1; i < sub.size(); ++i) EXPECT_LT(sub[i - 1], sub[i]);
        EXPECT_GE(sub.front(), 2);
        EXPECT_LE(sub.back(), n);
      }
      EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    }
    EXPECT_EQ(total, (std::size_t{1} << (n - 1)) - 1);
  }
}

TEST(EnumerateSubsets, RejectsBadSizes) {
  EXPECT_THROW(enumerate_subsets(4, 0), std::invalid_argument);
  EXPECT_THROW(enumerate_subsets(4, 4), std::invalid_argument);
  EXPECT_THROW(enumerate_subsets(1, 1), std::invalid_argument);
}

TEST(PartyCount, Cap) {
  EXPECT_NO_THROW(require_party_count(2));
  EXPECT_NO_THROW(require_party_count(kMaxParties));
  EXPECT_THROW(require_party_count(1), std::invalid_argument);
  EXPECT_THROW(require_party_count(kMaxParties + 1), std::invalid_argument);
}

}  // namespace
}  // namespace mbell
