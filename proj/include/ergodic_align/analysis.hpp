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

// Delay analysis: closed-form exponents, the best-composition search and its
// bounds, exact enumeration oracles for small instances, Monte Carlo delay
// estimation and log-log exponent fitting, and the many-user regimes.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergodic_align/gfq.hpp"
#include "ergodic_align/rational.hpp"
#include "ergodic_align/schemes.hpp"

namespace ergodic_align {

/// Thrown when a computation outlives its time budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an enumeration would exceed kEnumerationLimit points.
class EnumerationTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kEnumerationLimit = 100'000'000;

/// Wall-clock budget; a default-constructed deadline never expires.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(double seconds);
  bool expired() const;
  /// Throws BudgetExceeded naming `what` if expired.
  void check(const char* what) const;

 private:
  std::optional<std::chrono::steady_clock::time_point> until_;
};

// ---------------------------------------------------------------------------
// Exponents

struct RoundExponents {
  std::vector<long long> per_round;  // T_k for k = 1..K
  long long overall = 0;             // max_k T_k
};

/// T_k = a_k (n - k - 1).
RoundExponents jap_exponent(const Composition& a);
/// T_k = (a_k - 1)(n - k - 1).
RoundExponents japb_exponent(const Composition& a);
/// Delay exponent of any scheme: n^2 for NGJV, 0 for TDMA, a child inherits
/// its parent's.
long long scheme_exponent(const SchemeSpec& spec, int users);

struct Optimum {
  int users = 0;
  int rounds = 0;
  long long exponent = 0;             // T(n, K)
  BigInt argmin_count;                // number of compositions attaining it
  std::vector<Composition> argmins;   // lexicographic, at most the requested number
  bool unique() const { return argmin_count == 1; }
  bool truncated() const { return BigInt(argmins.size()) < argmin_count; }
};

/// T(n, K) = min over a in A(n, K) of the JAP-B exponent, for 1 <= K <= n.
///
/// Exact without enumerating A(n, K): T_B(a) <= T iff every round with
/// d_k = n - k - 1 > 0 has a_k <= 1 + floor(T / d_k), so T is feasible iff
/// those caps (rounds with d_k <= 0 are uncapped) leave room for weight n.
/// Feasibility is monotone in T; a binary search finds the least feasible T,
/// and the argmins are exactly the compositions inside the caps.
Optimum optimize(int users, int rounds, std::size_t max_listed = 64,
                 const Deadline& deadline = {});

struct BoundPair {
  Rational lower;
  Rational upper;
};

/// n(n-2)/K - (2n - K - 2) <= T(n, K) <= n(n-2)/K, for 1 <= K <= n - 2.
BoundPair bounds(int users, int rounds);

struct HarmonicBounds {
  Rational sum;                    // S(n, K) = sum_{k=1}^K 1/(n-k-1)
  Rational lower;                  // K/(n-2)
  std::optional<Rational> upper;   // K/(n-K-2), defined for K <= n - 3
};

HarmonicBounds harmonic_bounds(int users, int rounds);

// ---------------------------------------------------------------------------
// Many-user regimes

enum class Regime { constant_dof, constant_sum_rate };

/// Regime I holds DOF = alpha in (0, 1/2]; Regime II holds DOF = beta/n with
/// beta >= 1.
struct RegimeParams {
  Regime regime = Regime::constant_dof;
  Rational value;  // alpha or beta

  static RegimeParams alpha(Rational a);
  static RegimeParams beta(Rational b);
};

struct ParentPrediction {
  int rounds = 0;     // K implied by the DOF target
  Rational lower;     // Regime I: n^2/K on both sides
  Rational upper;     // Regime II: [(beta-2) n, beta n]
};

/// Parent JAP-B asymptotics at n users.
ParentPrediction regime_parent(const RegimeParams& params, int users);

struct ChildPrediction {
  int parent_users = 0;      // m
  long long exponent = 0;    // (m-1)(m-2)
  Rational asymptotic;       // Regime I: 4 a^2 n^2 - 6 a n + 2; Regime II: exponent
};

/// Child schemes of JAP-B([m]) at n users.
ChildPrediction regime_child(const RegimeParams& params, int users);

// ---------------------------------------------------------------------------
// Exact oracles

enum class EnumerationMethod {
  full_matrix,   // every candidate matrix, (q-1)^(n^2) points
  per_receiver,  // each receiver row separately, (q-1)^n points each
};

/// Exact probability that a uniformly drawn next matrix lets every receiver of
/// round k (1-based) recover from `history` (slots t_0..t_{k-1}) plus that
/// matrix. With `beamformed`, receiver A_{k-1}+1 is served by JAP-B
/// beamforming. Throws EnumerationTooLarge above kEnumerationLimit points.
Rational exact_round_probability(const Composition& a, int round,
                                 std::span<const SlotRecord> history, bool beamformed,
                                 EnumerationMethod method = EnumerationMethod::per_receiver,
                                 const Deadline& deadline = {});

/// Per-receiver success probabilities of round k; the beamformed receiver
/// (if any) contributes 1.
std::vector<Rational> exact_receiver_probabilities(const Composition& a, int round,
                                                   std::span<const SlotRecord> history,
                                                   bool beamformed,
                                                   const Deadline& deadline = {});

/// P(V_1 + ... + V_L = 0) for V_m IID uniform on F_q \ {0}, from the signed
/// closed form 1/q + (-1)^L / (q (q-1)^(L-1)).
Rational lemma3_failure(std::uint32_t q, int terms);
/// Same probability by exact convolution of the mass functions.
Rational lemma3_convolution(std::uint32_t q, int terms);
/// The unsigned form 1/q + 1/(q (q-1)^(L-1)); equals the signed one only for
/// even L.
Rational lemma3_failure_unsigned(std::uint32_t q, int terms);

struct SpanFullness {
  Rational proportion;     // fraction of span vectors with no zero entry
  Rational expansion;      // 1 - (k-1)/q, the first-order expansion it is compared to
  std::size_t dimension = 0;
};

/// Enumerates the q^k vectors of the span of a linearly independent basis.
SpanFullness span_fullness(std::span<const FieldVector> basis, const Deadline& deadline = {});

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloConfig {
  SchemeSpec scheme;
  int users = 1;
  std::uint32_t q = 3;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  unsigned threads = 0;          // 0: hardware concurrency
  std::uint64_t max_slots = 0;   // per-run cap, 0 = unbounded
  Deadline deadline;
};

struct DelayStats {
  std::string scheme;
  int users = 0;
  std::uint32_t q = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double mean_delay = 0.0;
  double std_error = 0.0;
  std::vector<double> round_means;
  std::vector<double> round_std_errors;
  std::uint64_t resamples = 0;
  Rational dof;
  long long exponent = 0;
};

/// Per-trial summaries; trial i always runs on Rng::stream(seed, i).
std::vector<RunSummary> simulate_trials(const MonteCarloConfig& config);
DelayStats summarize(const MonteCarloConfig& config, std::span<const RunSummary> runs);
DelayStats monte_carlo(const MonteCarloConfig& config);

// ---------------------------------------------------------------------------
// Fitting

struct ExponentFit {
  std::vector<double> q_values;
  std::vector<double> mean_delays;
  double slope = 0.0;          // T, regressing ln D on ln q
  double intercept = 0.0;      // ln C
  double slope_qm1 = 0.0;      // regressing ln D on ln(q-1)
  double intercept_qm1 = 0.0;
};

/// Least squares in log-log coordinates; needs >= 3 distinct q and positive
/// delays.
ExponentFit fit_exponent(std::span<const std::pair<double, double>> sweep);

/// ln(D2/D1) / ln(q2/q1).
double two_point_exponent(double q1, double d1, double q2, double d2);

// ---------------------------------------------------------------------------
// Tables and figure data

struct TableCell {
  int users = 0;
  int rounds = 0;
  Rational dof;
  long long exponent = 0;
  Composition argmin{std::vector<int>{1}};
  bool unique = true;
  bool tdma_equivalent = false;  // K >= n - 1
};

/// Best JAP-B schemes for n_min <= n <= n_max, 1 <= K <= n - 1.
std::vector<TableCell> best_scheme_table(int n_min, int n_max, const Deadline& deadline = {});

struct FigurePoint {
  int users = 0;
  std::string family;     // ngjv | japb | child-ngjv | child-japb | tdma
  int parent_users = 0;
  int rounds = 0;         // K of the parent (0 for TDMA)
  std::string composition;
  Rational dof;
  long long exponent = 0;
};

/// NGJV, best JAP-B parent per K, every child of those parents (including
/// time-shared NGJV) and TDMA, at n users.
std::vector<FigurePoint> figure_points(int users, const Deadline& deadline = {});

struct RegimeRow {
  int users = 0;
  int parameter = 0;            // K (parent) or m (child)
  long long exact = 0;          // T(n, K) or (m-1)(m-2)
  Rational predicted_lower;
  Rational predicted_upper;
  double ratio = 0.0;           // parent: exact / (n^2/K) in Regime I, exact / n in
                                // Regime II; child: exact / asymptotic
};

std::vector<RegimeRow> regime_parent_sweep(const RegimeParams& params, int n_min, int n_max,
                                           const Deadline& deadline = {});
std::vector<RegimeRow> regime_child_sweep(const RegimeParams& params, int n_min, int n_max);

}  // namespace ergodic_align
