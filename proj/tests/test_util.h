// Copyright 2026 The Coupon Probing Authors.
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

// Instance generators and brute-force helpers shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#ifndef COUPON_PROBING_TESTS_TEST_UTIL_H_
#define COUPON_PROBING_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/model.h"
#include "coupon_probing/random.h"

namespace coupon_probing::testing {

// Each ordered pair becomes an edge with probability `density`; the edge
// probability is drawn from `probs` when given, uniform on [0, 1] otherwise.
inline Graph RandomGraph(int nodes, double density, Rng& rng,
                         const std::vector<double>& probs = {}) {
  std::vector<Edge> edges;
  for (int u = 0; u < nodes; ++u) {
    for (int v = 0; v < nodes; ++v) {
      if (u == v || !Bernoulli(rng, density)) continue;
      double p = UniformUnit(rng);
      if (!probs.empty()) p = probs[rng() % probs.size()];
      edges.push_back({u, v, p});
    }
  }
  return Graph(nodes, std::move(edges));
}

// Sorted uniform draws per user, so every row is rational.
inline std::vector<std::vector<double>> RandomAttractiveness(int users, int coupons,
                                                             Rng& rng) {
  std::vector<std::vector<double>> rows(users, std::vector<double>(coupons));
  for (auto& row : rows) {
    for (double& p : row) p = UniformUnit(rng);
    std::sort(row.begin(), row.end());
  }
  return rows;
}

struct InstanceShape {
  int users = 4;
  int coupons = 2;
  int probe_cap = 2;
  double density = 0.4;
  std::optional<int> user_cap;
};

// Coupons at 1..m, budget drawn so the low/high split is non-trivial.
inline Instance RandomInstance(const InstanceShape& shape, Rng& rng) {
  std::vector<double> coupons(shape.coupons);
  for (int c = 0; c < shape.coupons; ++c) coupons[c] = c + 1.0;
  const double budget = 1.0 + UniformUnit(rng) * 2.0 * shape.coupons;
  return Instance(RandomGraph(shape.users, shape.density, rng), coupons,
                  RandomAttractiveness(shape.users, shape.coupons, rng),
                  shape.probe_cap, budget, shape.user_cap);
}

// |C| = 2 with c_min < B/2 < c_max <= B: both combiner branches are live.
inline Instance TinySplitInstance(int users, int probe_cap, std::optional<int> user_cap,
                                  Rng& rng, double density = 0.4) {
  const double budget = 2.0 + 2.0 * UniformUnit(rng);
  const double low = budget / 2 * (0.2 + 0.7 * UniformUnit(rng));
  const double high = budget / 2 + budget / 2 * (0.1 + 0.9 * UniformUnit(rng));
  return Instance(RandomGraph(users, density, rng), {low, high},
                  RandomAttractiveness(users, 2, rng), probe_cap, budget, user_cap);
}

// Five users a..e = 0..4, coupons {1, 2}, K = 1, B = 3, no edges.
inline Instance ToyInstance() {
  std::vector<std::vector<double>> p = {
      {0.3, 0.7}, {0.6, 0.9}, {0.2, 0.5}, {0.4, 0.8}, {0.1, 0.3}};
  return Instance(Graph(5, {}), {1.0, 2.0}, p, 1, 3.0);
}

// Brute-force LP optimum over vertices: every choice of n tight constraints
// among A x <= b and x >= 0 is solved by Gaussian elimination and kept if
// feasible. Only for a handful of variables.
inline double VertexEnumerationOptimum(const std::vector<double>& c,
                                       const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.size());
  std::vector<std::vector<double>> rows = a;
  std::vector<double> rhs = b;
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
  }
  const int total = m + n;
  double best = -INFINITY;
  std::vector<int> pick;
  auto solve = [&]() {
    std::vector<std::vector<double>> mat(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) mat[i][j] = rows[pick[i]][j];
      mat[i][n] = rhs[pick[i]];
    }
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int i = col + 1; i < n; ++i) {
        if (std::abs(mat[i][col]) > std::abs(mat[piv][col])) piv = i;
      }
      if (std::abs(mat[piv][col]) < 1e-12) return;
      std::swap(mat[piv], mat[col]);
      for (int i = 0; i < n; ++i) {
        if (i == col) continue;
        const double f = mat[i][col] / mat[col][col];
        for (int j = col; j <= n; ++j) mat[i][j] -= f * mat[col][j];
      }
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = mat[i][n] / mat[i][i];
    for (int i = 0; i < total; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
      if (lhs > rhs[i] + 1e-9) return;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += c[j] * x[j];
    best = std::max(best, obj);
  };
  auto choose = [&](auto&& self, int start) -> void {
    if (static_cast<int>(pick.size()) == n) {
      solve();
      return;
    }
    for (int i = start; i < total; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  choose(choose, 0);
  return best;
}

}  // namespace coupon_probing::testing

#endif  // COUPON_PROBING_TESTS_TEST_UTIL_H_
