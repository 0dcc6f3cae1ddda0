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

#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mbell/npa.hpp"
#include "mbell/sdp.hpp"

namespace mbell::sdp {
namespace {

TEST(Solve, EigenvalueProblem) {
  SdpProblem p = SdpProblem::single_block(2);
  p.objective.add(0, 0, 0, 1.0);
  p.objective.add(0, 1, 1, -1.0);
  LinearConstraint trace;
  trace.matrix.add(0, 0, 0, 1.0);
  trace.matrix.add(0, 1, 1, 1.0);
  trace.value = 1.0;
  p.equalities.push_back(trace);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, 1.0, 1e-7);
  EXPECT_NEAR(s.matrix()(0, 0), 1.0, 1e-6);
  EXPECT_NEAR(s.matrix()(1, 1), 0.0, 1e-6);
  EXPECT_NEAR(s.matrix()(0, 1), 0.0, 1e-6);
}

TEST(Solve, CorrelationMatrix) {
  SdpProblem p = SdpProblem::single_block(2);
  p.objective.add(0, 0, 1, 1.0);  // symmetric entry counts X01 + X10
  for (int i = 0; i < 2; ++i) {
    LinearConstraint c;
    c.matrix.add(0, i, i, 1.0);
    c.value = 1.0;
    p.equalities.push_back(c);
  }
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, 2.0, 1e-7);
  EXPECT_NEAR(s.matrix()(0, 1), 1.0, 1e-6);
  EXPECT_NEAR(s.dual_value, s.value, 1e-6);
}

TEST(Solve, InequalityUsesSlackBlock) {
  // max X00 s.t. X00 + X11 = 2, X00 <= 1.5 (as -X00 >= -1.5).
  SdpProblem p = SdpProblem::single_block(2);
  p.objective.add(0, 0, 0, 1.0);
  LinearConstraint trace;
  trace.matrix.add(0, 0, 0, 1.0);
  trace.matrix.add(0, 1, 1, 1.0);
  trace.value = 2.0;
  p.equalities.push_back(trace);
  LinearConstraint cap;
  cap.matrix.add(0, 0, 0, -1.0);
  cap.value = -1.5;
  p.inequalities.push_back(cap);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, 1.5, 1e-6);
}

TEST(Solve, InfeasibleIsReported) {
  // X00 = -1 has no PSD solution.
  SdpProblem p = SdpProblem::single_block(1);
  p.objective.add(0, 0, 0, 1.0);
  LinearConstraint c;
  c.matrix.add(0, 0, 0, 1.0);
  c.value = -1.0;
  p.equalities.push_back(c);
  const Solution s = solve(p);
  EXPECT_EQ(s.status, Status::kInfeasible);
}

TEST(Solve, IterationCapIsReported) {
  SdpProblem p = SdpProblem::single_block(2);
  p.objective.add(0, 0, 1, 1.0);
  for (int i = 0; i < 2; ++i) {
    LinearConstraint c;
    c.matrix.add(0, i, i, 1.0);
    c.value = 1.0;
    p.equalities.push_back(c);
  }
  Config cfg;
  cfg.max_iterations = 2;
  cfg.keep_log = true;
  const Solution s = solve(p, cfg);
  EXPECT_EQ(s.status, Status::kMaxIterations);
  EXPECT_EQ(s.iterations, 2);
  EXPECT_EQ(s.log.size(), 3u);  // starting point plus two steps
  EXPECT_STREQ(to_string(s.status), "max-iterations");
}

TEST(Solve, RejectsMalformedProblems) {
  SdpProblem p = SdpProblem::single_block(2);
  p.objective.add(0, 0, 3, 1.0);
  EXPECT_THROW(solve(p), std::invalid_argument);
  SdpProblem q;
  q.blocks = {0};
  EXPECT_THROW(solve(q), std::invalid_argument);
}

TEST(Solve, ChshRelaxation) {
  const auto mp = npa::build_moment_problem(2, npa::Level::kOne, build_bell(2));
  const Solution s = solve(npa::to_sdp(mp));
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(npa::relaxation_value(mp, s), std::numbers::sqrt2, 1e-6);
}

TEST(Solve, Deterministic) {
  const auto sf = npa::to_sdp(npa::build_moment_problem(3, npa::Level::kOnePlusAB, build_bell(3)));
  const Solution a = solve(sf);
  const Solution b = solve(sf);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Sdpa, RoundTrip) {
  const auto sf = npa::to_sdp(npa::build_moment_problem(2, npa::Level::kTwo, build_bell(2)));
  std::ostringstream first;
  write_sdpa(first, sf);
  std::istringstream in(first.str());
  const StandardForm back = read_sdpa(in);
  std::ostringstream second;
  write_sdpa(second, back);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_NEAR(solve(back).value, solve(sf).value, 1e-9);
}

TEST(Sdpa, RejectsGarbage) {
  std::istringstream in("not an sdpa file");
  EXPECT_THROW(read_sdpa(in), std::runtime_error);
}

}  // namespace
}  // namespace mbell::sdp
