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

// Exact arithmetic and dense linear algebra over a prime field F_q.
//
// Hot loops (scheme simulation, enumeration oracles) work on raw residues
// through PrimeField's member functions; FieldElement and FieldVector are the
// checked value types used at API boundaries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace ergodic_align {

using Residue = std::uint32_t;

/// Raised when values from two different fields meet in one operation.
class FieldMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by operations that are undefined on their input (inverse of zero).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

bool is_prime(std::uint64_t value);

/// The prime field Z/qZ. Construction rejects non-prime q and q >= 2^31.
class PrimeField {
 public:
  static constexpr std::uint32_t kMaxModulus = (1u << 31) - 1;

  explicit PrimeField(std::uint32_t q);

  std::uint32_t q() const noexcept { return q_; }

  Residue reduce(std::int64_t value) const noexcept {
    auto r = value % static_cast<std::int64_t>(q_);
    return static_cast<Residue>(r < 0 ? r + q_ : r);
  }
  Residue add(Residue a, Residue b) const noexcept {
    Residue s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  Residue sub(Residue a, Residue b) const noexcept { return a >= b ? a - b : a + q_ - b; }
  Residue neg(Residue a) const noexcept { return a == 0 ? 0 : q_ - a; }
  Residue mul(Residue a, Residue b) const noexcept {
    return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % q_);
  }
  Residue pow(Residue base, std::uint64_t exponent) const noexcept;
  /// Throws DomainError on zero.
  Residue inv(Residue a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t q_;
};

/// One element of a PrimeField; 0 <= value < q always holds.
class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::int64_t value)
      : value_(field.reduce(value)), field_(field) {}

  Residue value() const noexcept { return value_; }
  const PrimeField& field() const noexcept { return field_; }
  bool is_zero() const noexcept { return value_ == 0; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  FieldElement operator-() const { return {field_, field_.neg(value_)}; }
  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }
  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << e.value_;
  }

 private:
  FieldElement(const PrimeField& field, Residue value, int) : value_(value), field_(field) {}
  friend FieldElement mul_inv(const FieldElement& a);

  Residue value_;
  PrimeField field_;
};

FieldElement add(const FieldElement& a, const FieldElement& b);
FieldElement mul(const FieldElement& a, const FieldElement& b);
/// Multiplicative inverse; throws DomainError for zero.
FieldElement mul_inv(const FieldElement& a);

/// Fixed-length vector over one field. Entries are stored as raw residues, so
/// "all entries share one field" holds by construction.
class FieldVector {
 public:
  FieldVector(const PrimeField& field, std::size_t length);
  FieldVector(const PrimeField& field, std::vector<Residue> entries);
  FieldVector(const PrimeField& field, std::initializer_list<std::int64_t> entries);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t size() const noexcept { return entries_.size(); }
  FieldElement operator[](std::size_t i) const { return {field_, entries_.at(i)}; }
  Residue raw(std::size_t i) const { return entries_[i]; }
  void set(std::size_t i, Residue v) { entries_.at(i) = field_.reduce(v); }
  std::span<const Residue> entries() const noexcept { return entries_; }
  bool is_zero() const noexcept;

  /// this += scale * other
  void axpy(Residue scale, const FieldVector& other);
  FieldVector scaled(Residue scale) const;

  friend bool operator==(const FieldVector&, const FieldVector&) = default;
  friend std::ostream& operator<<(std::ostream& os, const FieldVector& v);

 private:
  PrimeField field_;
  std::vector<Residue> entries_;
};

/// Coefficients lambda_0..lambda_K of a vanishing linear combination.
using CoefficientVector = std::vector<Residue>;

/// Basis of the null space of the matrix whose COLUMNS are `columns`: every
/// returned x satisfies sum_m x[m] * columns[m] = 0. Each basis vector is
/// scaled so its first nonzero entry is 1. Basis vector i is the one attached
/// to the i-th free (non-pivot) column, in increasing column order.
std::vector<CoefficientVector> null_space(std::span<const FieldVector> columns);

/// Finds lambda, not all zero, with sum_m lambda_m v_m = 0, or nullopt if the
/// vectors are independent. When the last vector lies in the span of the
/// earlier ones the returned lambda has a nonzero last entry. The first
/// nonzero entry is normalized to 1.
std::optional<CoefficientVector> linear_dependence(std::span<const FieldVector> vectors);

std::size_t rank(std::span<const FieldVector> vectors);

/// sum_m coefficients[m] * vectors[m]
FieldVector combine(std::span<const FieldVector> vectors, std::span<const Residue> coefficients);

}  // namespace ergodic_align
