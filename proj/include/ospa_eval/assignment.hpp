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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ospa_eval/error.hpp"
#include "ospa_eval/numeric.hpp"

namespace ospa_eval {

// Dense rectangular matrix of finite, non-negative costs.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw Error(ErrorKind::dimension_mismatch, "cost matrix has " + std::to_string(values_.size()) +
                                                     " entries, expected " + std::to_string(rows_ * cols_));
    }
    for (double v : values_) check(v);
  }

  CostMatrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()) {
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    values_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw Error(ErrorKind::dimension_mismatch, "ragged cost matrix");
      for (double v : row) {
        check(v);
        values_.push_back(v);
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

  void set(std::size_t row, std::size_t col, double value) {
    check(value);
    values_[row * cols_ + col] = value;
  }

  CostMatrix transposed() const {
    CostMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.values_[j * rows_ + i] = values_[i * cols_ + j];
    return t;
  }

 private:
  static void check(double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::invariant_violation, "cost entries must be finite and >= 0");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

namespace detail {

// Sums the matched entries in ascending order of value so the result only
// depends on which entries were matched, not on the matrix orientation.
inline AssignmentResult finish(const CostMatrix& c, std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> entries;
  entries.reserve(pairs.size());
  for (const auto& [r, col] : pairs) entries.push_back(c(r, col));
  std::sort(entries.begin(), entries.end());
  CompensatedSum sum;
  for (double v : entries) sum.add(v);
  return {std::move(pairs), sum.value()};
}

}  // namespace detail

// Minimum-cost matching of size min(rows, cols) via the shortest augmenting
// path form of the Hungarian method with row/column potentials.
// O(r^2 c) for r <= c.
inline AssignmentResult solve_assignment(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw Error(ErrorKind::empty_matrix, "assignment needs at least one row and one column");
  }
  const bool flip = cost.rows() > cost.cols();
  const CostMatrix transposed = flip ? cost.transposed() : CostMatrix(0, 0);
  const CostMatrix& m = flip ? transposed : cost;

  const std::size_t n = m.rows();
  const std::size_t k = m.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> owner(k + 1, 0), way(k + 1, 0);
  std::vector<double> min_slack(k + 1);
  std::vector<char> used(k + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = m(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n);
  for (std::size_t j = 1; j <= k; ++j) {
    if (owner[j] == 0) continue;
    const std::size_t row = owner[j] - 1;
    const std::size_t col = j - 1;
    pairs.emplace_back(flip ? col : row, flip ? row : col);
  }
  return detail::finish(cost, std::move(pairs));
}

inline constexpr std::size_t kBruteForceLimit = 8;

// Exhaustive enumeration of every injection from the smaller side into the
// larger one. Test oracle for solve_assignment.
inline AssignmentResult brute_force_assignment(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw Error(ErrorKind::empty_matrix, "assignment needs at least one row and one column");
  }
  const bool flip = cost.rows() > cost.cols();
  const std::size_t small = std::min(cost.rows(), cost.cols());
  const std::size_t large = std::max(cost.rows(), cost.cols());
  if (small > kBruteForceLimit) {
    throw Error(ErrorKind::size_limit, "brute force supports min(rows, cols) <= " +
                                           std::to_string(kBruteForceLimit));
  }
  auto entry = [&](std::size_t s, std::size_t l) { return flip ? cost(l, s) : cost(s, l); };

  std::vector<std::size_t> current(small), best(small);
  std::vector<char> taken(large, 0);
  double best_cost = std::numeric_limits<double>::infinity();

  auto recurse = [&](auto&& self, std::size_t depth, double acc) -> void {
    if (depth == small) {
      if (acc < best_cost) {
        best_cost = acc;
        best = current;
      }
      return;
    }
    for (std::size_t l = 0; l < large; ++l) {
      if (taken[l]) continue;
      taken[l] = 1;
      current[depth] = l;
      self(self, depth + 1, acc + entry(depth, l));
      taken[l] = 0;
    }
  };
  recurse(recurse, 0, 0.0);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(small);
  for (std::size_t s = 0; s < small; ++s) {
    pairs.emplace_back(flip ? best[s] : s, flip ? s : best[s]);
  }
  return detail::finish(cost, std::move(pairs));
}

}  // namespace ospa_eval
