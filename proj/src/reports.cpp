// Copyright 2026 The ergodic-align Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ergodic_align/analysis.hpp"

namespace ergodic_align {

std::vector<TableCell> best_scheme_table(int n_min, int n_max, const Deadline& deadline) {
  if (n_min < 2 || n_max < n_min) throw std::invalid_argument("table needs 2 <= n_min <= n_max");
  std::vector<TableCell> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int k = 1; k <= n - 1; ++k) {
      const auto best = optimize(n, k, 1, deadline);
      TableCell cell;
      cell.users = n;
      cell.rounds = k;
      cell.dof = scheme_dof(k);
      cell.exponent = best.exponent;
      cell.argmin = best.argmins.front();
      cell.unique = best.unique();
      cell.tdma_equivalent = k >= n - 1;
      out.push_back(std::move(cell));
    }
  }
  return out;
}

namespace {

struct Parent {
  std::string family;
  int rounds;
  std::string composition;
  Rational dof_rounds;  // 1/(K+1)
  long long exponent;
};

// NGJV and the best JAP-B scheme for each K at m users.
std::vector<Parent> parents(int m, const Deadline& deadline) {
  std::vector<Parent> out;
  out.push_back({"ngjv", 1, "", make_rational(1, 2), static_cast<long long>(m) * m});
  for (int k = 1; k <= m - 1; ++k) {
    const auto best = optimize(m, k, 1, deadline);
    out.push_back({"japb", k, best.argmins.front().to_string(), scheme_dof(k), best.exponent});
  }
  return out;
}

}  // namespace

std::vector<FigurePoint> figure_points(int users, const Deadline& deadline) {
  if (users < 3) throw std::invalid_argument("figure data needs n >= 3");
  std::vector<FigurePoint> out;
  for (const auto& p : parents(users, deadline)) {
    out.push_back({users, p.family, users, p.rounds, p.composition, p.dof_rounds, p.exponent});
  }
  for (int m = 2; m < users; ++m) {
    for (const auto& p : parents(m, deadline)) {
      out.push_back({users, "child-" + p.family, m, p.rounds, p.composition,
                     p.dof_rounds * make_rational(m, users), p.exponent});
    }
  }
  out.push_back({users, "tdma", users, 0, "", make_rational(1, users), 0});
  return out;
}

std::vector<RegimeRow> regime_parent_sweep(const RegimeParams& params, int n_min, int n_max,
                                           const Deadline& deadline) {
  if (n_min < 3 || n_max < n_min) throw std::invalid_argument("sweep needs 3 <= n_min <= n_max");
  std::vector<RegimeRow> out;
  for (int n = n_min; n <= n_max; ++n) {
    if (params.regime == Regime::constant_sum_rate && n < 2 * params.value) continue;
    const auto predicted = regime_parent(params, n);
    if (predicted.rounds > n - 1) continue;
    RegimeRow row;
    row.users = n;
    row.parameter = predicted.rounds;
    row.exact = optimize(n, predicted.rounds, 1, deadline).exponent;
    row.predicted_lower = predicted.lower;
    row.predicted_upper = predicted.upper;
    const double exact = static_cast<double>(row.exact);
    row.ratio = params.regime == Regime::constant_dof ? exact / to_double(predicted.upper)
                                                      : exact / n;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<RegimeRow> regime_child_sweep(const RegimeParams& params, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("sweep needs 1 <= n_min <= n_max");
  std::vector<RegimeRow> out;
  for (int n = n_min; n <= n_max; ++n) {
    const bool defined = params.regime == Regime::constant_dof
                             ? 2 * params.value * n >= 1
                             : floor(2 * params.value) <= n;
    if (!defined) continue;
    const auto predicted = regime_child(params, n);
    RegimeRow row;
    row.users = n;
    row.parameter = predicted.parent_users;
    // The parent JAP-B([m]) is the only one-round composition at m users.
    row.exact = optimize(predicted.parent_users, 1).exponent;
    row.predicted_lower = row.predicted_upper = predicted.asymptotic;
    const double asymptotic = to_double(predicted.asymptotic);
    row.ratio = asymptotic != 0.0 ? static_cast<double>(row.exact) / asymptotic
                                  : (row.exact == 0 ? 1.0 : 0.0);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace ergodic_align
