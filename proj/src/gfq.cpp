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

#include "ergodic_align/gfq.hpp"

#include <string>

namespace ergodic_align {

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  if (value % 2 == 0) return value == 2;
  for (std::uint64_t d = 3; d * d <= value; d += 2) {
    if (value % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint32_t q) : q_(q) {
  if (q > kMaxModulus) {
    throw std::invalid_argument("field size " + std::to_string(q) + " exceeds 2^31-1");
  }
  if (!is_prime(q)) {
    throw std::invalid_argument("field size " + std::to_string(q) + " is not prime");
  }
}

Residue PrimeField::pow(Residue base, std::uint64_t exponent) const noexcept {
  Residue result = 1 % q_;
  while (exponent > 0) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

Residue PrimeField::inv(Residue a) const {
  if (a % q_ == 0) throw DomainError("inverse of zero in F_" + std::to_string(q_));
  // Extended Euclid on (a, q).
  std::int64_t r0 = q_, r1 = a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    std::int64_t quot = r0 / r1;
    std::int64_t r2 = r0 - quot * r1;
    r0 = r1;
    r1 = r2;
    std::int64_t s2 = s0 - quot * s1;
    s0 = s1;
    s1 = s2;
  }
  return reduce(s0);
}

namespace {

void require_same_field(const PrimeField& a, const PrimeField& b) {
  if (!(a == b)) {
    throw FieldMismatch("operands from F_" + std::to_string(a.q()) + " and F_" +
                        std::to_string(b.q()));
  }
}

}  // namespace

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  require_same_field(a.field_, b.field_);
  return {a.field_, a.field_.add(a.value_, b.value_), 0};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  require_same_field(a.field_, b.field_);
  return {a.field_, a.field_.sub(a.value_, b.value_), 0};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  require_same_field(a.field_, b.field_);
  return {a.field_, a.field_.mul(a.value_, b.value_), 0};
}

FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }

FieldElement mul_inv(const FieldElement& a) {
  return {a.field_, a.field_.inv(a.value_), 0};
}

FieldVector::FieldVector(const PrimeField& field, std::size_t length)
    : field_(field), entries_(length, 0) {}

FieldVector::FieldVector(const PrimeField& field, std::vector<Residue> entries)
    : field_(field), entries_(std::move(entries)) {
  for (auto& e : entries_) e = field_.reduce(e);
}

FieldVector::FieldVector(const PrimeField& field, std::initializer_list<std::int64_t> entries)
    : field_(field) {
  entries_.reserve(entries.size());
  for (auto e : entries) entries_.push_back(field_.reduce(e));
}

bool FieldVector::is_zero() const noexcept {
  for (auto e : entries_) {
    if (e != 0) return false;
  }
  return true;
}

void FieldVector::axpy(Residue scale, const FieldVector& other) {
  require_same_field(field_, other.field_);
  if (other.size() != size()) throw std::invalid_argument("vector length mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] = field_.add(entries_[i], field_.mul(scale, other.entries_[i]));
  }
}

FieldVector FieldVector::scaled(Residue scale) const {
  FieldVector out(field_, size());
  out.axpy(scale, *this);
  return out;
}

std::ostream& operator<<(std::ostream& os, const FieldVector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    if (i) os << ',';
    os << v.entries_[i];
  }
  return os << ')';
}

namespace {

struct Echelon {
  std::vector<std::vector<Residue>> rows;  // reduced row echelon form, dims x cols
  std::vector<std::size_t> pivot_cols;     // pivot column of row r
  std::vector<bool> is_pivot;
};

void check_columns(std::span<const FieldVector> columns) {
  if (columns.empty()) return;
  const auto& f = columns.front().field();
  const auto len = columns.front().size();
  for (const auto& c : columns) {
    require_same_field(f, c.field());
    if (c.size() != len) throw std::invalid_argument("vector length mismatch");
  }
}

// Gauss-Jordan elimination with first-nonzero pivoting, columns left to right.
// Column j ends up a pivot column iff columns[j] is not in the span of
// columns[0..j-1].
Echelon reduce_columns(std::span<const FieldVector> columns) {
  const auto& f = columns.front().field();
  const std::size_t dims = columns.front().size();
  const std::size_t cols = columns.size();
  Echelon e;
  e.rows.assign(dims, std::vector<Residue>(cols, 0));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < dims; ++r) e.rows[r][c] = columns[c].raw(r);
  }
  e.is_pivot.assign(cols, false);
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < dims; ++c) {
    std::size_t p = row;
    while (p < dims && e.rows[p][c] == 0) ++p;
    if (p == dims) continue;
    std::swap(e.rows[p], e.rows[row]);
    const Residue scale = f.inv(e.rows[row][c]);
    for (auto& x : e.rows[row]) x = f.mul(x, scale);
    for (std::size_t r = 0; r < dims; ++r) {
      if (r == row || e.rows[r][c] == 0) continue;
      const Residue factor = e.rows[r][c];
      for (std::size_t cc = c; cc < cols; ++cc) {
        e.rows[r][cc] = f.sub(e.rows[r][cc], f.mul(factor, e.rows[row][cc]));
      }
    }
    e.pivot_cols.push_back(c);
    e.is_pivot[c] = true;
    ++row;
  }
  return e;
}

CoefficientVector normalize_first_nonzero(const PrimeField& f, CoefficientVector x) {
  for (auto v : x) {
    if (v != 0) {
      const Residue s = f.inv(v);
      for (auto& y : x) y = f.mul(y, s);
      break;
    }
  }
  return x;
}

CoefficientVector basis_for_free_column(const PrimeField& f, const Echelon& e,
                                        std::size_t free_col, std::size_t cols) {
  CoefficientVector x(cols, 0);
  x[free_col] = 1;
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) {
    x[e.pivot_cols[r]] = f.neg(e.rows[r][free_col]);
  }
  return normalize_first_nonzero(f, std::move(x));
}

}  // namespace

std::vector<CoefficientVector> null_space(std::span<const FieldVector> columns) {
  check_columns(columns);
  if (columns.empty()) return {};
  const auto& f = columns.front().field();
  const auto e = reduce_columns(columns);
  std::vector<CoefficientVector> basis;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!e.is_pivot[c]) basis.push_back(basis_for_free_column(f, e, c, columns.size()));
  }
  return basis;
}

std::optional<CoefficientVector> linear_dependence(std::span<const FieldVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("linear_dependence of an empty list");
  check_columns(vectors);
  const auto& f = vectors.front().field();
  const auto e = reduce_columns(vectors);
  const std::size_t last = vectors.size() - 1;
  std::optional<CoefficientVector> out;
  if (!e.is_pivot[last]) {
    out = basis_for_free_column(f, e, last, vectors.size());
  } else {
    for (std::size_t c = 0; c < last; ++c) {
      if (!e.is_pivot[c]) {
        out = basis_for_free_column(f, e, c, vectors.size());
        break;
      }
    }
  }
  if (out && !combine(vectors, *out).is_zero()) {
    throw std::logic_error("linear_dependence produced a non-vanishing combination");
  }
  return out;
}

std::size_t rank(std::span<const FieldVector> vectors) {
  check_columns(vectors);
  if (vectors.empty() || vectors.front().size() == 0) return 0;
  return reduce_columns(vectors).pivot_cols.size();
}

FieldVector combine(std::span<const FieldVector> vectors, std::span<const Residue> coefficients) {
  if (vectors.empty()) throw std::invalid_argument("combine of an empty list");
  if (vectors.size() != coefficients.size()) {
    throw std::invalid_argument("coefficient count does not match vector count");
  }
  check_columns(vectors);
  FieldVector out(vectors.front().field(), vectors.front().size());
  for (std::size_t m = 0; m < vectors.size(); ++m) out.axpy(coefficients[m], vectors[m]);
  return out;
}

}  // namespace ergodic_align
