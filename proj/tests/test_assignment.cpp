// Copyright 2026 The ospa_eval Authors.
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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ospa_eval/assignment.hpp"

namespace {

using namespace ospa_eval;

std::vector<std::vector<double>> rows_of(const CostMatrix& c) {
  std::vector<std::vector<double>> out(c.rows(), std::vector<double>(c.cols()));
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) out[i][j] = c(i, j);
  return out;
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostMatrix c(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c.set(i, j, u(rng));
  return c;
}

void expect_valid(const CostMatrix& c, const AssignmentResult& r) {
  ASSERT_EQ(r.pairs.size(), std::min(c.rows(), c.cols()));
  std::set<std::size_t> rows, cols;
  double sum = 0.0;
  for (const auto& [i, j] : r.pairs) {
    EXPECT_TRUE(rows.insert(i).second);
    EXPECT_TRUE(cols.insert(j).second);
    sum += c(i, j);
  }
  EXPECT_NEAR(r.total_cost, sum, 1e-12);
}

TEST(SolveAssignment, OneByOne) {
  const auto r = solve_assignment(CostMatrix{{0.3}});
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
  EXPECT_DOUBLE_EQ(r.total_cost, 0.3);
}

TEST(SolveAssignment, IdentityForcedBySymmetry) {
  const auto r = solve_assignment(CostMatrix{{0, 1}, {1, 0}});
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_EQ(r.total_cost, 0.0);
}

TEST(SolveAssignment, EmptyMatrix) {
  try {
    solve_assignment(CostMatrix(0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_matrix);
  }
}

TEST(CostMatrix, RejectsNegativeAndNonFinite) {
  EXPECT_THROW((CostMatrix{{-0.1}}), Error);
  EXPECT_THROW((CostMatrix{{std::numeric_limits<double>::quiet_NaN()}}), Error);
}

TEST(BruteForce, Fixtures) {
  const auto r = brute_force_assignment(CostMatrix{{1, 2}, {3, 0}});
  EXPECT_EQ(r.total_cost, 1.0);
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  const auto s = brute_force_assignment(CostMatrix{{0.2, 0.1, 0.9}});
  EXPECT_EQ(s.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  EXPECT_DOUBLE_EQ(s.total_cost, 0.1);
}

TEST(BruteForce, SizeLimit) {
  try {
    brute_force_assignment(CostMatrix(9, 9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::size_limit);
  }
}

TEST(SolveAssignment, MatchesEnumerationOnRandomRectangles) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    const CostMatrix c = random_matrix(rng, 4, 6);
    const auto fast = solve_assignment(c);
    expect_valid(c, fast);
    EXPECT_NEAR(fast.total_cost, oracle::brute_min_cost(rows_of(c)), 1e-12);
    EXPECT_NEAR(fast.total_cost, brute_force_assignment(c).total_cost, 1e-12);
  }
}

TEST(SolveAssignment, TransposeGivesIdenticalCost) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    std::uniform_int_distribution<std::size_t> dim(1, 7);
    const CostMatrix c = random_matrix(rng, dim(rng), dim(rng));
    EXPECT_EQ(solve_assignment(c).total_cost, solve_assignment(c.transposed()).total_cost);
  }
}

TEST(SolveAssignment, PermutationAndShiftInvariance) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const std::size_t m = 5, n = 7;
    const CostMatrix c = random_matrix(rng, m, n);
    std::vector<std::size_t> rp(m), cp(n);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    CostMatrix permuted(m, n), shifted(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        permuted.set(i, j, c(rp[i], cp[j]));
        shifted.set(i, j, c(i, j) + 0.25);
      }
    }
    const double base = solve_assignment(c).total_cost;
    EXPECT_NEAR(solve_assignment(permuted).total_cost, base, 1e-12);
    EXPECT_NEAR(solve_assignment(shifted).total_cost, base + 0.25 * m, 1e-12);
  }
}

}  // namespace
