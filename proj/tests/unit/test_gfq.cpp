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

#include <doctest.h>

#include <random>

#include "brute_force.hpp"
#include "ergodic_align/gfq.hpp"

using namespace ergodic_align;

namespace {

std::vector<std::vector<Residue>> raw(const std::vector<FieldVector>& vs) {
  std::vector<std::vector<Residue>> out;
  for (const auto& v : vs) out.emplace_back(v.entries().begin(), v.entries().end());
  return out;
}

}  // namespace

TEST_CASE("prime field construction") {
  CHECK(is_prime(2));
  CHECK(is_prime(2147483647));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
  CHECK_THROWS_AS(PrimeField(4), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(0), std::invalid_argument);
  CHECK_NOTHROW(PrimeField(PrimeField::kMaxModulus));
}

TEST_CASE("element arithmetic") {
  const PrimeField f3(3), f5(5), f7(7);
  CHECK(add(FieldElement(f3, 2), FieldElement(f3, 2)).value() == 1);
  for (int x = 0; x < 5; ++x) CHECK(add(FieldElement(f5, 0), FieldElement(f5, x)).value() == x);
  CHECK(add(FieldElement(f7, 3), FieldElement(f7, 4)).value() == 0);
  CHECK(FieldElement(f7, -1).value() == 6);
  CHECK((FieldElement(f7, 3) - FieldElement(f7, 5)).value() == 5);
  CHECK((-FieldElement(f7, 3)).value() == 4);
  CHECK(mul(FieldElement(f7, 3), FieldElement(f7, 5)).value() == 1);
}

TEST_CASE("mixing fields is rejected") {
  const PrimeField f3(3), f5(5);
  CHECK_THROWS_AS(add(FieldElement(f3, 1), FieldElement(f5, 1)), FieldMismatch);
  CHECK_THROWS_AS(FieldElement(f3, 1) * FieldElement(f5, 1), FieldMismatch);
  CHECK_THROWS_AS(FieldVector(f3, {1, 2}).axpy(1, FieldVector(f5, {1, 2})), FieldMismatch);
}

TEST_CASE("inverses") {
  CHECK(mul_inv(FieldElement(PrimeField(3), 2)).value() == 2);
  CHECK(mul_inv(FieldElement(PrimeField(5), 3)).value() == 2);
  CHECK(mul_inv(FieldElement(PrimeField(2), 1)).value() == 1);
  CHECK_THROWS_AS(mul_inv(FieldElement(PrimeField(5), 0)), DomainError);
  for (std::uint32_t q = 2; q <= 97; ++q) {
    if (!is_prime(q)) continue;
    const PrimeField f(q);
    for (std::uint32_t a = 1; a < q; ++a) {
      CHECK(mul(FieldElement(f, a), mul_inv(FieldElement(f, a))).value() == 1);
    }
  }
  const PrimeField big(PrimeField::kMaxModulus);
  CHECK(big.mul(123456789, big.inv(123456789)) == 1);
}

TEST_CASE("linear dependence examples") {
  const PrimeField f3(3);
  std::vector<FieldVector> pair{FieldVector(f3, {1, 2}), FieldVector(f3, {2, 1})};
  const auto lam = linear_dependence(pair);
  REQUIRE(lam);
  // (1,2) + (2,1) = (3,3) = 0: normalized so the first coefficient is 1.
  CHECK(*lam == CoefficientVector{1, 1});

  for (std::uint32_t q : {2u, 3u, 5u, 13u}) {
    const PrimeField f(q);
    const FieldVector v(f, {1, static_cast<std::int64_t>(q - 1), 1});
    std::vector<FieldVector> same{v, v};
    CHECK(*linear_dependence(same) == CoefficientVector{1, q - 1});
  }

  const PrimeField f2(2);
  std::vector<FieldVector> xor3{FieldVector(f2, {1, 0}), FieldVector(f2, {0, 1}),
                                FieldVector(f2, {1, 1})};
  CHECK(*linear_dependence(xor3) == CoefficientVector{1, 1, 1});

  std::vector<FieldVector> basis{FieldVector(f3, {1, 0}), FieldVector(f3, {0, 1})};
  CHECK_FALSE(linear_dependence(basis));
  CHECK_THROWS_AS(linear_dependence(std::vector<FieldVector>{}), std::invalid_argument);
  std::vector<FieldVector> ragged{FieldVector(f3, {1, 0}), FieldVector(f3, {1})};
  CHECK_THROWS_AS(linear_dependence(ragged), std::invalid_argument);
}

TEST_CASE("linear dependence agrees with exhaustive search") {
  std::mt19937_64 gen(7);
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const PrimeField f(q);
    for (std::size_t dim = 1; dim <= 3; ++dim) {
      for (std::size_t count = 1; count <= 4; ++count) {
        for (int rep = 0; rep < 40; ++rep) {
          std::vector<FieldVector> vs;
          for (std::size_t c = 0; c < count; ++c) {
            std::vector<Residue> e(dim);
            for (auto& x : e) x = static_cast<Residue>(gen() % q);
            vs.emplace_back(f, e);
          }
          const auto expected = brute::dependence(f, raw(vs));
          const auto lam = linear_dependence(vs);
          REQUIRE(lam.has_value() == expected.dependent);
          if (!lam) continue;
          CHECK(combine(vs, *lam).is_zero());
          const auto first = std::find_if(lam->begin(), lam->end(), [](Residue x) { return x; });
          REQUIRE(first != lam->end());
          CHECK(*first == 1);
          if (expected.last_in_span) CHECK(lam->back() != 0);
        }
      }
    }
  }
}

TEST_CASE("null space basis") {
  const PrimeField f(5);
  std::vector<FieldVector> cols{FieldVector(f, {1, 2, 3}), FieldVector(f, {2, 4, 1}),
                                FieldVector(f, {3, 1, 4}), FieldVector(f, {0, 0, 0})};
  const auto basis = null_space(cols);
  CHECK(basis.size() == cols.size() - rank(cols));
  for (const auto& x : basis) {
    CHECK(combine(cols, x).is_zero());
    CHECK(*std::find_if(x.begin(), x.end(), [](Residue r) { return r; }) == 1);
  }
}

TEST_CASE("rank") {
  const PrimeField f2(2), f7(7);
  CHECK(rank(std::vector<FieldVector>{}) == 0);
  CHECK(rank(std::vector<FieldVector>{FieldVector(f7, {0, 3, 0})}) == 1);
  CHECK(rank(std::vector<FieldVector>{FieldVector(f7, {0, 0})}) == 0);
  CHECK(rank(std::vector<FieldVector>{FieldVector(f2, {1, 0}), FieldVector(f2, {0, 1}),
                                      FieldVector(f2, {1, 1})}) == 2);

  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<FieldVector> vs;
    for (int c = 0; c < 4; ++c) {
      std::vector<Residue> e(3);
      for (auto& x : e) x = static_cast<Residue>(gen() % 7);
      vs.emplace_back(f7, e);
    }
    const auto r = rank(vs);
    auto swapped = vs;
    std::swap(swapped[0], swapped[3]);
    CHECK(rank(swapped) == r);
    auto scaled = vs;
    scaled[1] = scaled[1].scaled(1 + static_cast<Residue>(gen() % 6));
    CHECK(rank(scaled) == r);
  }
}

TEST_CASE("vector operations") {
  const PrimeField f(5);
  FieldVector v(f, {1, 2, 3});
  v.axpy(2, FieldVector(f, {1, 1, 1}));
  CHECK(v == FieldVector(f, {3, 4, 0}));
  CHECK(v[1].value() == 4);
  CHECK(v.scaled(2) == FieldVector(f, {1, 3, 0}));
  CHECK(FieldVector(f, 3).is_zero());
}
