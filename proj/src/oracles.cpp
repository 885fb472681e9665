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

// Exact small-instance oracles. Everything here counts; nothing samples.

#include <string>

#include "ergodic_align/analysis.hpp"

namespace ergodic_align {

namespace {

std::uint64_t checked_power(std::uint64_t base, std::uint64_t exponent, const char* what) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && out > kEnumerationLimit / base) {
      throw EnumerationTooLarge(std::string(what) + ": more than " +
                                std::to_string(kEnumerationLimit) + " points to enumerate");
    }
    out *= base;
  }
  return out;
}

// Steps `digits` (each in [lo, hi)) to the next tuple; false after the last.
bool advance(std::vector<Residue>& digits, Residue lo, Residue hi) {
  for (auto& d : digits) {
    if (++d < hi) return true;
    d = lo;
  }
  return false;
}

struct RoundShape {
  std::size_t first;  // A_{k-1}
  std::size_t last;   // A_k
  std::size_t users;
  PrimeField field;
};

RoundShape check_round(const Composition& a, int round, std::span<const SlotRecord> history) {
  if (round < 1 || round > a.rounds()) throw std::invalid_argument("round index out of range");
  if (history.size() != static_cast<std::size_t>(round)) {
    throw std::invalid_argument("round k needs the k slots t_0..t_{k-1} as history");
  }
  const auto n = static_cast<std::size_t>(a.users());
  for (const auto& s : history) {
    if (s.matrix.users() != n) throw std::invalid_argument("history does not match n");
  }
  return {static_cast<std::size_t>(a.partial_sum(round - 1)),
          static_cast<std::size_t>(a.partial_sum(round)), n, history.front().matrix.field()};
}

}  // namespace

std::vector<Rational> exact_receiver_probabilities(const Composition& a, int round,
                                                   std::span<const SlotRecord> history,
                                                   bool beamformed, const Deadline& deadline) {
  const auto shape = check_round(a, round, history);
  const auto q1 = shape.field.q() - 1;
  const auto rows = checked_power(q1, shape.users, "exact_round_probability");
  checked_power(rows, 1, "exact_round_probability");
  if (rows * (shape.last - shape.first) > kEnumerationLimit) {
    throw EnumerationTooLarge("exact_round_probability: more than " +
                              std::to_string(kEnumerationLimit) + " points to enumerate");
  }

  std::vector<SlotRecord> extended(history.begin(), history.end());
  extended.push_back(SlotRecord::plain(history.front().matrix));
  std::vector<Rational> out;
  for (std::size_t j = shape.first; j < shape.last; ++j) {
    if (beamformed && j == shape.first) {
      out.push_back(1);
      continue;
    }
    // Rows of the next matrix are independent and uniform; a gain vector with
    // nonzero entries permutes them, so only receiver j's own row matters.
    std::vector<Residue> entries(shape.users * shape.users, 1);
    std::vector<Residue> row(shape.users, 1);
    std::uint64_t hits = 0;
    std::uint64_t visited = 0;
    do {
      if ((++visited & 0xFFFF) == 0) deadline.check("exact_round_probability");
      std::copy(row.begin(), row.end(), entries.begin() + static_cast<long>(j * shape.users));
      extended.back() = SlotRecord::plain(ChannelMatrix(shape.field, shape.users, entries));
      if (recovery_check(std::span<const SlotRecord>(extended), j)) ++hits;
    } while (advance(row, 1, shape.field.q()));
    out.push_back(Rational(BigInt(hits), BigInt(rows)));
  }
  return out;
}

Rational exact_round_probability(const Composition& a, int round,
                                 std::span<const SlotRecord> history, bool beamformed,
                                 EnumerationMethod method, const Deadline& deadline) {
  if (method == EnumerationMethod::per_receiver) {
    Rational p = 1;
    for (const auto& r : exact_receiver_probabilities(a, round, history, beamformed, deadline)) {
      p *= r;
    }
    return p;
  }

  const auto shape = check_round(a, round, history);
  const auto total = checked_power(shape.field.q() - 1, shape.users * shape.users,
                                   "exact_round_probability");
  std::vector<SlotRecord> extended(history.begin(), history.end());
  extended.push_back(SlotRecord::plain(history.front().matrix));
  std::vector<Residue> entries(shape.users * shape.users, 1);
  std::uint64_t hits = 0;
  std::uint64_t visited = 0;
  do {
    if ((++visited & 0xFFFF) == 0) deadline.check("exact_round_probability");
    ChannelMatrix candidate(shape.field, shape.users, entries);
    auto gains = beamformed ? beamforming_gains(history.front().matrix, candidate, shape.first)
                            : std::vector<Residue>(shape.users, 1);
    extended.back() = SlotRecord{std::move(candidate), std::move(gains)};
    bool all = true;
    for (std::size_t j = shape.first; j < shape.last && all; ++j) {
      const bool ok = recovery_check(std::span<const SlotRecord>(extended), j).has_value();
      if (!ok && beamformed && j == shape.first) {
        throw std::logic_error("beamformed receiver failed in enumeration");
      }
      all = ok;
    }
    if (all) ++hits;
  } while (advance(entries, 1, shape.field.q()));
  return Rational(BigInt(hits), BigInt(total));
}

namespace {

void check_lemma3_args(std::uint32_t q, int terms) {
  if (!is_prime(q)) throw std::invalid_argument("q must be prime");
  if (terms < 1) throw std::invalid_argument("need L >= 1 terms");
}

}  // namespace

Rational lemma3_failure(std::uint32_t q, int terms) {
  check_lemma3_args(q, terms);
  BigInt tail = q;
  for (int i = 1; i < terms; ++i) tail *= (q - 1);
  const Rational correction(BigInt(1), tail);
  return make_rational(1, q) + (terms % 2 == 0 ? correction : Rational(-correction));
}

Rational lemma3_failure_unsigned(std::uint32_t q, int terms) {
  check_lemma3_args(q, terms);
  BigInt tail = q;
  for (int i = 1; i < terms; ++i) tail *= (q - 1);
  return make_rational(1, q) + Rational(BigInt(1), tail);
}

Rational lemma3_convolution(std::uint32_t q, int terms) {
  check_lemma3_args(q, terms);
  // ways[s]: number of tuples in (F_q*)^L summing to s.
  std::vector<BigInt> ways(q, 0);
  ways[0] = 1;
  BigInt total = 1;
  for (int t = 0; t < terms; ++t) {
    std::vector<BigInt> next(q, 0);
    for (std::uint32_t s = 0; s < q; ++s) {
      if (ways[s] == 0) continue;
      for (std::uint32_t v = 1; v < q; ++v) next[(s + v) % q] += ways[s];
    }
    ways = std::move(next);
    total *= (q - 1);
  }
  return Rational(ways[0], total);
}

SpanFullness span_fullness(std::span<const FieldVector> basis, const Deadline& deadline) {
  if (basis.empty()) throw std::invalid_argument("span_fullness needs a non-empty basis");
  if (rank(basis) != basis.size()) throw std::invalid_argument("span basis is linearly dependent");
  const auto& f = basis.front().field();
  const auto k = basis.size();
  const auto total = checked_power(f.q(), k, "span_fullness");
  std::vector<Residue> coefficients(k, 0);
  std::uint64_t full = 0;
  std::uint64_t visited = 0;
  do {
    if ((++visited & 0xFFFF) == 0) deadline.check("span_fullness");
    const auto v = combine(basis, coefficients);
    bool nonzero = true;
    for (auto e : v.entries()) nonzero = nonzero && e != 0;
    if (nonzero) ++full;
  } while (advance(coefficients, 0, f.q()));
  SpanFullness out;
  out.dimension = k;
  out.proportion = Rational(BigInt(full), BigInt(total));
  out.expansion = 1 - make_rational(static_cast<std::int64_t>(k) - 1, f.q());
  return out;
}

}  // namespace ergodic_align
