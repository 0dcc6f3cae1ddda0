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

#include <cmath>
#include <limits>
#include <sstream>

#include "mbell/io.hpp"
#include "mbell/lhv.hpp"

namespace mbell {
namespace {

TEST(FormatNumber, SignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(format_number(2.5e-7), "0.00000025");
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(123456.789012345), "123456.789");
  EXPECT_EQ(format_number(std::sqrt(2.0)), "1.414213562");
  EXPECT_EQ(format_number(std::sqrt(2.0), 4), "1.414");
  EXPECT_EQ(format_number(-1e-20), "0");
}

TEST(FormatNumber, NonFinite) {
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Table1, Rows) {
  std::ostringstream os;
  write_table1(os, 4);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,g_ghz,ratio_to_prev,theta");
  std::getline(in, line);
  EXPECT_EQ(line, "2,1.414213562,,2.35619449");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 6), "3,1.5,");
}

TEST(BoundsJson, Fields) {
  const auto j = to_json(classical_bounds_exhaustive(3, 1), "exhaustive");
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("mode"), "exhaustive");
  EXPECT_EQ(j.at("max"), 1);
  EXPECT_EQ(j.at("min"), -3);
  EXPECT_EQ(j.at("strategies_checked"), 64);
  EXPECT_EQ(to_json(Rational(-3, 4)), "-3/4");
}

TEST(RateCsv, HeaderAndFailedRow) {
  RatePoint bad;
  bad.n = 3;
  bad.p = 0.02;
  bad.error = "boom";
  std::ostringstream os;
  write_rate_csv(os, {bad}, true);
  EXPECT_EQ(os.str(),
            "n,p,g_obs,qber,p_guess,rate_raw,rate,chsh_rate,chsh_bottleneck_rate,parity_rate,level\n"
            "3,0.02,,,,,,,,,2\n");
}

}  // namespace
}  // namespace mbell
