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

#include <algorithm>
#include <limits>

#include "ergodic_align/analysis.hpp"

namespace ergodic_align {

Deadline::Deadline(double seconds) {
  if (seconds > 0.0) {
    until_ = std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(seconds));
  }
}

bool Deadline::expired() const {
  return until_ && std::chrono::steady_clock::now() >= *until_;
}

void Deadline::check(const char* what) const {
  if (expired()) throw BudgetExceeded(std::string(what) + ": time budget exhausted");
}

namespace {

RoundExponents round_exponents(const Composition& a, int discount) {
  RoundExponents out;
  out.overall = std::numeric_limits<long long>::min();
  const long long n = a.users();
  for (int k = 1; k <= a.rounds(); ++k) {
    const long long t = static_cast<long long>(a.part(k) - discount) * (n - k - 1);
    out.per_round.push_back(t);
    out.overall = std::max(out.overall, t);
  }
  return out;
}

}  // namespace

RoundExponents jap_exponent(const Composition& a) { return round_exponents(a, 0); }
RoundExponents japb_exponent(const Composition& a) { return round_exponents(a, 1); }

long long scheme_exponent(const SchemeSpec& spec, int users) {
  switch (spec.kind) {
    case SchemeKind::ngjv: return static_cast<long long>(users) * users;
    case SchemeKind::tdma: return 0;
    case SchemeKind::jap: return jap_exponent(Composition(spec.composition)).overall;
    case SchemeKind::japb: return japb_exponent(Composition(spec.composition)).overall;
    case SchemeKind::child:
      return scheme_exponent(SchemeSpec{spec.parent, spec.composition, SchemeKind::japb, 0},
                             spec.parent_users);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Best composition

namespace {

// Largest a_k allowed in round k if the exponent may not exceed `bound`.
std::vector<int> caps(int n, int rounds, long long bound) {
  const int widest = n - rounds + 1;
  std::vector<int> out(static_cast<std::size_t>(rounds));
  for (int k = 1; k <= rounds; ++k) {
    const long long d = n - k - 1;
    long long cap = d <= 0 ? widest : 1 + bound / d;
    out[static_cast<std::size_t>(k - 1)] = static_cast<int>(std::min<long long>(cap, widest));
  }
  return out;
}

bool feasible(int n, const std::vector<int>& cap) {
  long long total = 0;
  for (int c : cap) total += c;
  return total >= n;
}

void list_argmins(int n, const std::vector<int>& cap, std::size_t limit,
                  std::vector<Composition>& out) {
  const auto rounds = cap.size();
  std::vector<long long> tail(rounds + 1, 0);  // sum of caps of rounds k..K
  for (std::size_t k = rounds; k-- > 0;) tail[k] = tail[k + 1] + cap[k];
  std::vector<int> parts(rounds, 0);
  // Depth-first, smallest part first, so compositions come out lexicographically.
  auto visit = [&](auto&& self, std::size_t k, int used) -> void {
    if (out.size() >= limit) return;
    if (k == rounds) {
      if (used == n) out.emplace_back(parts);
      return;
    }
    const auto later = static_cast<long long>(rounds - k - 1);
    for (int v = 1; v <= cap[k]; ++v) {
      const long long rest = n - used - v;
      if (rest < later) break;
      if (rest > tail[k + 1]) continue;
      parts[k] = v;
      self(self, k + 1, used + v);
    }
  };
  visit(visit, 0, 0);
}

BigInt count_within(int n, const std::vector<int>& cap) {
  std::vector<BigInt> ways(static_cast<std::size_t>(n) + 1, 0);
  ways[0] = 1;
  for (int c : cap) {
    std::vector<BigInt> next(ways.size(), 0);
    for (std::size_t s = 0; s < ways.size(); ++s) {
      if (ways[s] == 0) continue;
      for (int v = 1; v <= c && s + static_cast<std::size_t>(v) < ways.size(); ++v) {
        next[s + static_cast<std::size_t>(v)] += ways[s];
      }
    }
    ways = std::move(next);
  }
  return ways[static_cast<std::size_t>(n)];
}

}  // namespace

Optimum optimize(int users, int rounds, std::size_t max_listed, const Deadline& deadline) {
  if (users < 1 || rounds < 1 || rounds > users) {
    throw std::invalid_argument("optimize needs 1 <= K <= n (got n = " + std::to_string(users) +
                                ", K = " + std::to_string(rounds) + ")");
  }
  // [n-K+1, 1, ..., 1] attains (n-K)(n-2), so the search interval is closed.
  long long lo = 0;
  long long hi = std::max<long long>(0, static_cast<long long>(users - rounds) * (users - 2));
  while (lo < hi) {
    deadline.check("optimize");
    const long long mid = lo + (hi - lo) / 2;
    if (feasible(users, caps(users, rounds, mid))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  Optimum out;
  out.users = users;
  out.rounds = rounds;
  const auto cap = caps(users, rounds, lo);
  out.argmin_count = count_within(users, cap);
  list_argmins(users, cap, std::max<std::size_t>(max_listed, 1), out.argmins);
  // Caps bound the exponent from above; the least feasible bound is attained.
  out.exponent = japb_exponent(out.argmins.front()).overall;
  if (out.exponent != lo) throw std::logic_error("optimize: argmin does not attain the optimum");
  return out;
}

BoundPair bounds(int users, int rounds) {
  if (rounds < 1 || rounds > users - 2) {
    throw std::invalid_argument("bounds need 1 <= K <= n - 2");
  }
  const Rational n = users;
  const Rational k = rounds;
  const Rational upper = n * (n - 2) / k;
  return {upper - (2 * n - k - 2), upper};
}

HarmonicBounds harmonic_bounds(int users, int rounds) {
  if (rounds < 1 || rounds > users - 2) {
    throw std::invalid_argument("S(n, K) is defined for 1 <= K <= n - 2");
  }
  HarmonicBounds out;
  out.sum = 0;
  for (int k = 1; k <= rounds; ++k) out.sum += make_rational(1, users - k - 1);
  out.lower = make_rational(rounds, users - 2);
  if (rounds <= users - 3) out.upper = make_rational(rounds, users - rounds - 2);
  return out;
}

// ---------------------------------------------------------------------------
// Regimes

RegimeParams RegimeParams::alpha(Rational a) {
  if (a <= 0 || a > make_rational(1, 2)) throw std::invalid_argument("alpha must lie in (0, 1/2]");
  return {Regime::constant_dof, std::move(a)};
}

RegimeParams RegimeParams::beta(Rational b) {
  if (b < 1) throw std::invalid_argument("beta must be at least 1");
  return {Regime::constant_sum_rate, std::move(b)};
}

ParentPrediction regime_parent(const RegimeParams& params, int users) {
  ParentPrediction out;
  const Rational n = users;
  if (params.regime == Regime::constant_dof) {
    out.rounds = static_cast<int>(floor(1 / params.value)) - 1;
    out.lower = out.upper = n * n / out.rounds;
  } else {
    out.rounds = static_cast<int>(floor(n / params.value)) - 1;
    if (out.rounds < 1) {
      throw std::invalid_argument("regime II needs n >= 2 beta so that K >= 1");
    }
    out.lower = (params.value - 2) * n;
    out.upper = params.value * n;
  }
  return out;
}

ChildPrediction regime_child(const RegimeParams& params, int users) {
  ChildPrediction out;
  const Rational n = users;
  if (params.regime == Regime::constant_dof) {
    out.parent_users = static_cast<int>(floor(2 * params.value * n));
    if (out.parent_users < 1) throw std::invalid_argument("regime I child needs floor(2 alpha n) >= 1");
    const Rational& a = params.value;
    out.asymptotic = 4 * a * a * n * n - 6 * a * n + 2;
  } else {
    out.parent_users = static_cast<int>(floor(2 * params.value));
    if (out.parent_users > users) throw std::invalid_argument("regime II child needs floor(2 beta) <= n");
  }
  const long long m = out.parent_users;
  out.exponent = (m - 1) * (m - 2);
  if (params.regime == Regime::constant_sum_rate) out.asymptotic = out.exponent;
  return out;
}

}  // namespace ergodic_align
