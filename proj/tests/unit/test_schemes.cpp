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

#include <cmath>

#include "brute_force.hpp"
#include "ergodic_align/schemes.hpp"

using namespace ergodic_align;

namespace {

// Remembers every matrix it hands out.
class RecordingStream final : public ChannelStream {
 public:
  explicit RecordingStream(ChannelStream& inner) : inner_(inner) {}
  ChannelMatrix next() override {
    seen.push_back(inner_.next());
    return seen.back();
  }
  std::uint64_t slots_drawn() const override { return inner_.slots_drawn(); }
  std::vector<ChannelMatrix> seen;

 private:
  ChannelStream& inner_;
};

std::vector<std::vector<Residue>> effective_rows(std::span<const SlotRecord> slots,
                                                 std::size_t j) {
  std::vector<std::vector<Residue>> rows;
  for (const auto& s : slots) {
    std::vector<Residue> row;
    for (std::size_t i = 0; i < s.matrix.users(); ++i) row.push_back(s.effective(j, i));
    rows.push_back(row);
  }
  return rows;
}

ChannelMatrix identity_minus(const ChannelMatrix& h) {
  const auto& f = h.field();
  const auto n = h.users();
  std::vector<Residue> e(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) e[j * n + i] = f.sub(j == i ? 1 : 0, h.at(j, i));
  }
  return ChannelMatrix(f, n, e);
}

ChannelMatrix draw_valid_ngjv(std::size_t n, const PrimeField& f, Rng& rng) {
  for (;;) {
    auto h = draw_matrix(n, f, rng);
    bool ok = true;
    for (std::size_t j = 0; j < n; ++j) ok = ok && h.at(j, j) != 1;
    if (ok) return h;
  }
}

void check_decodes(const SchemeRun& run, Rng& rng) {
  auto bank = MessageBank::transmit(run, random_messages(run.users, run.field, 8, rng));
  CHECK(bank.consistent(run));
  CHECK(decode(run, bank) == bank.messages());
}

}  // namespace

TEST_CASE("compositions") {
  const auto a = Composition::parse("[1,3]");
  CHECK(a.users() == 4);
  CHECK(a.rounds() == 2);
  CHECK(a.partial_sum(0) == 0);
  CHECK(a.partial_sum(1) == 1);
  CHECK(a.partial_sum(2) == 4);
  CHECK(a.to_string() == "[1,3]");
  CHECK(Composition::parse("2, 2") == Composition({2, 2}));
  CHECK(Composition({1, 2}) < Composition({2, 1}));
  CHECK_THROWS_AS(Composition({1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Composition({}), std::invalid_argument);
  CHECK_THROWS_AS(Composition::parse("1,x"), std::invalid_argument);
}

TEST_CASE("recovery check examples") {
  const PrimeField f(5);
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto h0 = draw_valid_ngjv(3, f, rng);
    const std::vector<ChannelMatrix> pair{h0, identity_minus(h0)};
    for (std::size_t j = 0; j < 3; ++j) {
      const auto lam = recovery_check(std::span<const ChannelMatrix>(pair), j);
      REQUIRE(lam);
      CHECK(*lam == CoefficientVector{1, 1});
    }
    const std::vector<ChannelMatrix> single{h0};
    CHECK_FALSE(recovery_check(std::span<const ChannelMatrix>(single), 0));
  }
  // One user has no interference at all.
  const std::vector<ChannelMatrix> alone{ChannelMatrix(f, 1, {3})};
  const auto lam = recovery_check(std::span<const ChannelMatrix>(alone), 0);
  REQUIRE(lam);
  CHECK(*lam == CoefficientVector{2});  // 3 * 2 = 1 mod 5
  CHECK_THROWS_AS(recovery_check(std::span<const ChannelMatrix>(), 0), std::invalid_argument);
  const std::vector<ChannelMatrix> mixed{ChannelMatrix(f, 1, {3}), ChannelMatrix(f, 2, {1, 1, 1, 1})};
  CHECK_THROWS_AS(recovery_check(std::span<const ChannelMatrix>(mixed), 0), std::invalid_argument);
}

TEST_CASE("two-user recovery matches the ratio condition exhaustively") {
  const PrimeField f(3);
  brute::tuples(8, 1, 3, [&](const std::vector<Residue>& e) {
    const ChannelMatrix h0(f, 2, {e[0], e[1], e[2], e[3]});
    const ChannelMatrix h1(f, 2, {e[4], e[5], e[6], e[7]});
    const std::vector<ChannelMatrix> hist{h0, h1};
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t o = 1 - j;
      const bool same_ratio =
          f.mul(h1.at(j, j), f.inv(h1.at(j, o))) == f.mul(h0.at(j, j), f.inv(h0.at(j, o)));
      const auto lam = recovery_check(std::span<const ChannelMatrix>(hist), j);
      CHECK(lam.has_value() == !same_ratio);
    }
  });
}

TEST_CASE("recovery check agrees with exhaustive lambda search") {
  for (std::uint32_t q : {3u, 5u}) {
    const PrimeField f(q);
    Rng rng(q * 31);
    for (std::size_t n : {2u, 3u, 4u}) {
      for (std::size_t len = 1; len <= 4; ++len) {
        for (int rep = 0; rep < 60; ++rep) {
          std::vector<SlotRecord> hist;
          for (std::size_t m = 0; m < len; ++m) {
            auto h = draw_matrix(n, f, rng);
            std::vector<Residue> g(n);
            for (auto& x : g) x = static_cast<Residue>(rng.uniform_below(q));
            hist.push_back({h, m == 0 ? std::vector<Residue>(n, 1) : g});
          }
          for (std::size_t j = 0; j < n; ++j) {
            const auto lam = recovery_check(std::span<const SlotRecord>(hist), j);
            REQUIRE(lam.has_value() ==
                    brute::recoverable(f, effective_rows(hist, j), j));
            if (!lam) continue;
            Residue diag = 0;
            for (std::size_t m = 0; m < len; ++m) {
              diag = f.add(diag, f.mul((*lam)[m], hist[m].effective(j, j)));
            }
            CHECK(diag == 1);
          }
        }
      }
    }
  }
}

TEST_CASE("ngjv") {
  SUBCASE("n = 1, H0 = (2) waits for (2)") {
    const PrimeField f(3);
    const ChannelMatrix h0(f, 1, {2});
    const int trials = 100000;
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      RandomChannelStream s(1, f, Rng::stream(12, t));
      total += static_cast<double>(ngjv_run(h0, s).delay);
    }
    CHECK(std::abs(total / trials - 2.0) < 0.1);
  }
  SUBCASE("resamples are counted and decoding is exact") {
    const PrimeField f(3);
    Rng msg(1);
    std::uint64_t resamples = 0;
    for (int t = 0; t < 200; ++t) {
      RandomChannelStream s(2, f, Rng::stream(3, t));
      NgjvMachine m(2, f);
      drive(m, s);
      resamples += m.run().resamples;
      CHECK(m.run().rounds.size() == 1);
      CHECK(m.run().rounds[0].lambdas[0] == CoefficientVector{1, 1});
      CHECK(m.run().delay >= 1);
      check_decodes(m.run(), msg);
    }
    CHECK(resamples > 0);
  }
  CHECK_THROWS_AS(NgjvMachine(2, PrimeField(2)), std::invalid_argument);
}

TEST_CASE("jap on the NGJV pair completes in one slot") {
  const PrimeField f(7);
  Rng rng(4);
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto h0 = draw_valid_ngjv(n, f, rng);
    ScriptedChannelStream s({identity_minus(h0)});
    const auto run = jap_run(Composition({static_cast<int>(n)}), h0, s);
    CHECK(run.complete);
    CHECK(run.delay == 1);
  }
}

TEST_CASE("each jap round takes the first qualifying slot") {
  for (bool beam : {false, true}) {
    const PrimeField f(3);
    const Composition a({1, 2});
    for (int t = 0; t < 100; ++t) {
      RandomChannelStream inner(3, f, Rng::stream(77, t));
      RecordingStream s(inner);
      JapMachine m(a, f, beam);
      drive(m, s);
      const auto& run = m.run();
      REQUIRE(run.complete);
      for (const auto& round : run.rounds) {
        const auto previous = run.slots[round.slot_index - 1].matrix.slot();
        std::vector<SlotRecord> hist(run.slots.begin(),
                                     run.slots.begin() + static_cast<long>(round.slot_index));
        for (auto slot = previous + 1; slot < round.slot; ++slot) {
          const auto& h = s.seen[slot];
          auto gains = beam ? beamforming_gains(run.slots[0].matrix, h,
                                                static_cast<std::size_t>(a.partial_sum(round.k - 1)))
                            : std::vector<Residue>(3, 1);
          hist.push_back({h, gains});
          bool all = true;
          for (std::size_t j = static_cast<std::size_t>(a.partial_sum(round.k - 1));
               j < static_cast<std::size_t>(a.partial_sum(round.k)); ++j) {
            all = all && brute::recoverable(f, effective_rows(hist, j), j);
          }
          CHECK_FALSE(all);
          hist.pop_back();
        }
      }
    }
  }
}

TEST_CASE("jap-b beamforming") {
  SUBCASE("all-ones composition never waits") {
    const PrimeField f(5);
    for (int n = 2; n <= 5; ++n) {
      RandomChannelStream s(static_cast<std::size_t>(n), f, Rng(n));
      JapMachine m(Composition(std::vector<int>(static_cast<std::size_t>(n), 1)), f, true);
      drive(m, s);
      CHECK(m.run().delay == static_cast<std::uint64_t>(n));
    }
  }
  SUBCASE("beamformed receiver sees the interference of t_0 again") {
    const PrimeField f(7);
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
      const auto h0 = draw_matrix(4, f, rng);
      const auto h = draw_matrix(4, f, rng);
      const std::size_t l = rep % 4;
      const auto g = beamforming_gains(h0, h, l);
      const SlotRecord s{h, g};
      for (std::size_t i = 0; i < 4; ++i) {
        if (i != l) CHECK(s.effective(l, i) == h0.at(l, i));
      }
      CHECK(s.effective(l, l) == f.neg(h0.at(l, l)));
    }
  }
  SUBCASE("jap-b([n]) solves D0 H0 + D1 H1 G = I on users 2..n") {
    const PrimeField f(5);
    for (int t = 0; t < 30; ++t) {
      RandomChannelStream s(3, f, Rng::stream(9, t));
      JapMachine m(Composition({3}), f, true);
      drive(m, s);
      const auto& run = m.run();
      const auto& round = run.rounds.front();
      for (std::size_t r = 0; r < round.receivers.size(); ++r) {
        const auto j = round.receivers[r];
        if (j == 0) continue;
        for (std::size_t i = 0; i < 3; ++i) {
          const Residue v = f.add(f.mul(round.lambdas[r][0], run.slots[0].effective(j, i)),
                                  f.mul(round.lambdas[r][1], run.slots[1].effective(j, i)));
          CHECK(v == (i == j ? 1u : 0u));
        }
      }
    }
  }
  CHECK_THROWS_AS(JapMachine(Composition({2}), PrimeField(2), true), std::invalid_argument);
}

TEST_CASE("tdma") {
  const PrimeField f(3);
  for (std::size_t n : {1u, 4u, 5u}) {
    RandomChannelStream s(n, f, Rng(2));
    const auto run = tdma_run(n, s);
    CHECK(run.delay == n);
    CHECK(run.rounds.size() == n);
    Rng msg(3);
    check_decodes(run, msg);
  }
  CHECK(scheme_dof(SchemeSpec{SchemeKind::tdma, {}, SchemeKind::japb, 0}, 4) == make_rational(1, 4));
}

TEST_CASE("child schemes") {
  const PrimeField f(5);
  const SchemeSpec japb3{SchemeKind::japb, {3}, SchemeKind::japb, 0};
  CHECK(scheme_dof(SchemeSpec{SchemeKind::child, {3}, SchemeKind::japb, 3}, 6) == make_rational(1, 4));
  CHECK(scheme_dof(SchemeSpec{SchemeKind::child, {}, SchemeKind::ngjv, 2}, 4) == make_rational(1, 4));
  CHECK(lexicographic_subsets(4, 2).size() == 6);
  CHECK(lexicographic_subsets(4, 2)[1] == std::vector<std::size_t>{0, 2});

  RandomChannelStream s(5, f, Rng(8));
  const auto child = child_run(japb3, 3, 5, s);
  CHECK(child.complete());
  CHECK(child.runs.size() == 10);
  Rng msg(1);
  for (const auto& r : child.runs) check_decodes(r, msg);

  // m = n is the parent itself.
  for (int t = 0; t < 20; ++t) {
    RandomChannelStream a(3, f, Rng::stream(4, t)), b(3, f, Rng::stream(4, t));
    auto machine = make_machine(SchemeSpec{SchemeKind::child, {3}, SchemeKind::japb, 3}, 3, f);
    drive(*machine, a);
    JapMachine parent(Composition({3}), f, true);
    drive(parent, b);
    CHECK(machine->summary().delay == static_cast<double>(parent.run().delay));
  }
  CHECK_THROWS_AS(validate(SchemeSpec{SchemeKind::child, {3}, SchemeKind::japb, 6}, 5, f),
                  std::invalid_argument);
}

TEST_CASE("decode property and negative control") {
  Rng msg(42);
  for (std::uint32_t q : {3u, 5u, 7u}) {
    const PrimeField f(q);
    for (int n = 1; n <= 4; ++n) {
      std::vector<SchemeSpec> specs{{SchemeKind::tdma, {}, SchemeKind::japb, 0},
                                    {SchemeKind::japb, {n}, SchemeKind::japb, 0}};
      if (n <= 2) specs.push_back({SchemeKind::ngjv, {}, SchemeKind::japb, 0});
      if (n >= 2) specs.push_back({SchemeKind::jap, {1, n - 1}, SchemeKind::japb, 0});
      for (const auto& spec : specs) {
        for (int t = 0; t < 10; ++t) {
          RandomChannelStream s(static_cast<std::size_t>(n), f, Rng::stream(q * 100 + n, t));
          auto m = make_parent_machine(spec, n, f);
          drive(*m, s, 10'000'000);
          const auto& run = m->run();
          auto bank = MessageBank::transmit(run, random_messages(run.users, f, 8, msg));
          REQUIRE(decode(run, bank) == bank.messages());
          // Corrupt a slot the receiver actually combines.
          const auto& last = run.rounds.back();
          std::size_t used = 0;
          for (std::size_t m = 0; m < last.lambdas.front().size(); ++m) {
            if (last.lambdas.front()[m] != 0) used = m;
          }
          bank.corrupt(used, last.receivers.front(), 0);
          CHECK_FALSE(bank.consistent(run));
          CHECK_FALSE(decode(run, bank) == bank.messages());
        }
      }
    }
  }
}

TEST_CASE("incomplete runs cannot be decoded") {
  const PrimeField f(5);
  JapMachine m(Composition({2, 1}), f, false);
  m.offer(ChannelMatrix(f, 3, std::vector<Residue>(9, 1)));
  Rng rng(1);
  auto bank = MessageBank::transmit(m.run(), random_messages(3, f, 4, rng));
  CHECK_THROWS_AS(decode(m.run(), bank), IncompleteRun);
}

TEST_CASE("slot caps") {
  const PrimeField f(11);
  RandomChannelStream s(3, f, Rng(1));
  NgjvMachine m(3, f);
  CHECK_THROWS_AS(drive(m, s, 5), SlotCapExceeded);
}

TEST_CASE("scheme labels and parsing") {
  CHECK(parse_scheme_kind("japb") == SchemeKind::japb);
  CHECK_THROWS_AS(parse_scheme_kind("kwg"), std::invalid_argument);
  CHECK(SchemeSpec{SchemeKind::jap, {1, 3}, SchemeKind::japb, 0}.label() == "jap[1,3]");
  CHECK(SchemeSpec{SchemeKind::child, {3}, SchemeKind::japb, 3}.label() == "child(japb[3];m=3)");
}
