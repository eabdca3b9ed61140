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

// Dense primal simplex for packing-style linear programs
//   maximize c'x  subject to  A x <= b,  x >= 0,  with b >= 0,
// so the all-slack basis is feasible and no phase one is needed.

#ifndef COUPON_PROBING_LP_H_
#define COUPON_PROBING_LP_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coupon_probing/random.h"

namespace coupon_probing {

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
};

class UnboundedLpError : public ProbingError {
 public:
  using ProbingError::ProbingError;
};

namespace internal {

inline constexpr double kPivotTolerance = 1e-12;

}  // namespace internal

// `rows[i]` is row i of A (all rows have objective.size() entries). Uses
// Bland's rule, which terminates on degenerate problems.
inline LpSolution SolvePackingLp(const std::vector<double>& objective,
                                 const std::vector<std::vector<double>>& rows,
                                 const std::vector<double>& rhs) {
  const int n = static_cast<int>(objective.size());
  const int m = static_cast<int>(rows.size());
  if (static_cast<int>(rhs.size()) != m) throw ProbingError("lp: rhs size");
  for (double v : objective) {
    if (!std::isfinite(v)) throw ProbingError("lp: non-finite objective");
  }
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw ProbingError("lp: row size");
    if (!(rhs[i] >= 0.0) || !std::isfinite(rhs[i])) {
      throw ProbingError("lp: right-hand side must be finite and >= 0");
    }
  }
  const int width = n + m;
  // tableau[i] = [A | I | b]; reduced costs kept separately.
  std::vector<std::vector<double>> tableau(m, std::vector<double>(width + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    std::copy(rows[i].begin(), rows[i].end(), tableau[i].begin());
    tableau[i][n + i] = 1.0;
    tableau[i][width] = rhs[i];
  }
  std::vector<double> reduced(width, 0.0);
  for (int j = 0; j < n; ++j) reduced[j] = objective[j];
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  double scale = 1.0;
  for (double v : objective) scale = std::max(scale, std::abs(v));
  const double cost_tol = 1e-12 * scale;

  while (true) {
    int enter = -1;
    for (int j = 0; j < width; ++j) {
      if (reduced[j] > cost_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tableau[i][enter];
      if (a <= internal::kPivotTolerance) continue;
      const double ratio = tableau[i][width] / a;
      const bool tie = leave >= 0 && std::abs(ratio - best_ratio) <= 1e-15;
      if (leave < 0 || (!tie && ratio < best_ratio) ||
          (tie && basis[i] < basis[leave])) {
        best_ratio = std::min(best_ratio, ratio);
        leave = i;
      }
    }
    if (leave < 0) throw UnboundedLpError("lp: objective is unbounded");
    std::vector<double>& prow = tableau[leave];
    const double pivot = prow[enter];
    for (double& v : prow) v /= pivot;
    prow[enter] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = tableau[i][enter];
      if (factor == 0.0) continue;
      for (int j = 0; j <= width; ++j) tableau[i][j] -= factor * prow[j];
      tableau[i][enter] = 0.0;
      if (tableau[i][width] < 0.0) tableau[i][width] = 0.0;
    }
    const double rfactor = reduced[enter];
    for (int j = 0; j < width; ++j) reduced[j] -= rfactor * prow[j];
    reduced[enter] = 0.0;
    basis[leave] = enter;
  }

  LpSolution solution;
  solution.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) solution.x[basis[i]] = std::max(0.0, tableau[i][width]);
  }
  // Pull the point back inside the polytope if round-off pushed it out;
  // every constraint is a packing row, so shrinking towards 0 repairs it.
  double shrink = 1.0;
  for (int i = 0; i < m; ++i) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += rows[i][j] * solution.x[j];
    if (lhs > rhs[i]) shrink = std::min(shrink, rhs[i] / lhs);
  }
  if (shrink < 1.0) {
    for (double& v : solution.x) v *= shrink * (1.0 - 1e-15);
  }
  for (int j = 0; j < n; ++j) solution.objective += objective[j] * solution.x[j];
  return solution;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_LP_H_
