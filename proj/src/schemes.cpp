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

#include "ergodic_align/schemes.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

namespace ergodic_align {

// ---------------------------------------------------------------------------
// Composition

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("composition must have at least one part");
  for (int p : parts_) {
    if (p < 1) throw std::invalid_argument("composition parts must be positive");
    users_ += p;
  }
}

Composition Composition::parse(std::string_view text) {
  if (!text.empty() && text.front() == '[') text.remove_prefix(1);
  if (!text.empty() && text.back() == ']') text.remove_suffix(1);
  std::vector<int> parts;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw std::invalid_argument("malformed composition entry '" + std::string(item) + "'");
    }
    parts.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return Composition(std::move(parts));
}

int Composition::partial_sum(int k) const {
  if (k < 0 || k > rounds()) throw std::out_of_range("partial sum index out of range");
  return std::accumulate(parts_.begin(), parts_.begin() + k, 0);
}

std::string Composition::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(parts_[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Recovery predicate

SlotRecord SlotRecord::plain(const ChannelMatrix& h) {
  return {h, std::vector<Residue>(h.users(), 1)};
}

Residue SlotRecord::effective(std::size_t receiver, std::size_t transmitter) const {
  return matrix.field().mul(matrix.at(receiver, transmitter), gains[transmitter]);
}

FieldVector SlotRecord::effective_interference(std::size_t receiver) const {
  std::vector<Residue> v;
  v.reserve(matrix.users() - 1);
  for (std::size_t i = 0; i < matrix.users(); ++i) {
    if (i != receiver) v.push_back(effective(receiver, i));
  }
  return FieldVector(matrix.field(), std::move(v));
}

namespace {

std::optional<CoefficientVector> qualifying_combination(const PrimeField& f,
                                                        const std::vector<FieldVector>& interference,
                                                        const std::vector<Residue>& direct) {
  for (auto& basis : null_space(interference)) {
    Residue diagonal = 0;
    for (std::size_t m = 0; m < basis.size(); ++m) {
      diagonal = f.add(diagonal, f.mul(basis[m], direct[m]));
    }
    if (diagonal != 0) {
      const Residue s = f.inv(diagonal);
      for (auto& x : basis) x = f.mul(x, s);
      return basis;
    }
  }
  return std::nullopt;
}

void check_history(std::span<const SlotRecord> history, std::size_t receiver) {
  if (history.empty()) throw std::invalid_argument("recovery_check needs a non-empty history");
  const auto& first = history.front().matrix;
  if (receiver >= first.users()) throw std::invalid_argument("receiver index out of range");
  for (const auto& s : history) {
    if (s.matrix.users() != first.users() || !(s.matrix.field() == first.field())) {
      throw std::invalid_argument("history matrices differ in size or field");
    }
    if (s.gains.size() != first.users()) throw std::invalid_argument("gain vector size mismatch");
  }
}

}  // namespace

std::optional<CoefficientVector> recovery_check(std::span<const SlotRecord> history,
                                                std::size_t receiver) {
  check_history(history, receiver);
  std::vector<FieldVector> interference;
  std::vector<Residue> direct;
  interference.reserve(history.size());
  direct.reserve(history.size());
  for (const auto& s : history) {
    interference.push_back(s.effective_interference(receiver));
    direct.push_back(s.effective(receiver, receiver));
  }
  return qualifying_combination(history.front().matrix.field(), interference, direct);
}

std::optional<CoefficientVector> recovery_check(std::span<const ChannelMatrix> history,
                                                std::size_t receiver) {
  std::vector<SlotRecord> slots;
  slots.reserve(history.size());
  for (const auto& h : history) slots.push_back(SlotRecord::plain(h));
  return recovery_check(std::span<const SlotRecord>(slots), receiver);
}

std::vector<Residue> beamforming_gains(const ChannelMatrix& h0, const ChannelMatrix& h,
                                       std::size_t beamformed) {
  const auto& f = h.field();
  const auto l = beamformed;
  std::vector<Residue> gains(h.users());
  for (std::size_t i = 0; i < h.users(); ++i) gains[i] = f.mul(f.inv(h.at(l, i)), h0.at(l, i));
  gains[l] = f.neg(gains[l]);
  return gains;
}

void verify_round(const SchemeRun& run, const RoundRecord& round) {
  const auto& f = run.field;
  if (round.receivers.size() != round.lambdas.size()) {
    throw std::logic_error("round has mismatched receivers and coefficient lists");
  }
  for (std::size_t r = 0; r < round.receivers.size(); ++r) {
    const auto j = round.receivers[r];
    const auto& lambda = round.lambdas[r];
    if (lambda.size() != round.slot_index + 1) {
      throw std::logic_error("coefficient vector does not cover slots t_0..t_k");
    }
    FieldVector interference(f, run.users - 1);
    Residue direct = 0;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
      interference.axpy(lambda[m], run.slots[m].effective_interference(j));
      direct = f.add(direct, f.mul(lambda[m], run.slots[m].effective(j, j)));
    }
    if (!interference.is_zero() || direct != 1) {
      throw std::logic_error("round " + std::to_string(round.k) + " violates the recovery " +
                             "identities for receiver " + std::to_string(j));
    }
  }
}

// ---------------------------------------------------------------------------
// Scheme specs

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ngjv: return "ngjv";
    case SchemeKind::tdma: return "tdma";
    case SchemeKind::jap: return "jap";
    case SchemeKind::japb: return "japb";
    case SchemeKind::child: return "child";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  for (auto k : {SchemeKind::ngjv, SchemeKind::tdma, SchemeKind::jap, SchemeKind::japb,
                 SchemeKind::child}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

namespace {

std::string parent_label(SchemeKind kind, const std::vector<int>& composition) {
  std::string s(to_string(kind));
  if (kind == SchemeKind::jap || kind == SchemeKind::japb) s += Composition(composition).to_string();
  return s;
}

}  // namespace

std::string SchemeSpec::label() const {
  if (kind == SchemeKind::child) {
    return "child(" + parent_label(parent, composition) + ";m=" + std::to_string(parent_users) +
           ")";
  }
  return parent_label(kind, composition);
}

void validate(const SchemeSpec& spec, int users, const PrimeField& field) {
  if (users < 1) throw std::invalid_argument("need at least one user");
  switch (spec.kind) {
    case SchemeKind::tdma:
      return;
    case SchemeKind::ngjv:
      if (field.q() < 3) throw std::invalid_argument("ngjv needs q >= 3 (I - H has a zero for q = 2)");
      return;
    case SchemeKind::jap:
    case SchemeKind::japb: {
      if (field.q() < 3) throw std::invalid_argument("jap/japb need q >= 3");
      const Composition a(spec.composition);
      if (a.users() != users) {
        throw std::invalid_argument("composition " + a.to_string() + " does not sum to n = " +
                                    std::to_string(users));
      }
      return;
    }
    case SchemeKind::child: {
      if (spec.parent == SchemeKind::child) throw std::invalid_argument("child of a child scheme");
      if (spec.parent_users < 1 || spec.parent_users > users) {
        throw std::invalid_argument("child scheme needs 1 <= m <= n (got m = " +
                                    std::to_string(spec.parent_users) + ")");
      }
      validate(SchemeSpec{spec.parent, spec.composition, SchemeKind::japb, 0}, spec.parent_users,
               field);
      return;
    }
  }
}

Rational scheme_dof(const SchemeSpec& spec, int users) {
  switch (spec.kind) {
    case SchemeKind::ngjv: return scheme_dof(1);
    case SchemeKind::tdma: return make_rational(1, users);
    case SchemeKind::jap:
    case SchemeKind::japb: return scheme_dof(Composition(spec.composition).rounds());
    case SchemeKind::child:
      return make_rational(spec.parent_users, users) *
             scheme_dof(SchemeSpec{spec.parent, spec.composition, SchemeKind::japb, 0},
                        spec.parent_users);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Machines

ParentMachine::ParentMachine(std::string name, std::size_t users, const PrimeField& field) {
  run_.scheme = std::move(name);
  run_.users = users;
  run_.field = field;
}

RunSummary ParentMachine::summary() const {
  RunSummary s;
  s.delay = static_cast<double>(run_.delay);
  for (auto w : run_.waits) s.round_waits.push_back(static_cast<double>(w));
  s.resamples = run_.resamples;
  return s;
}

void ParentMachine::start(const SlotRecord& first) {
  run_.slots = {first};
  run_.start_slot = first.matrix.slot();
}

void ParentMachine::accept(SlotRecord slot, RoundRecord round) {
  const std::uint64_t previous = run_.slots.back().matrix.slot();
  round.slot = slot.matrix.slot();
  round.slot_index = run_.slots.size();
  run_.slots.push_back(std::move(slot));
  verify_round(run_, round);
  run_.waits.push_back(round.slot - previous);
  run_.rounds.push_back(std::move(round));
}

NgjvMachine::NgjvMachine(std::size_t users, const PrimeField& field)
    : ParentMachine("ngjv", users, field) {
  validate(SchemeSpec{SchemeKind::ngjv, {}, SchemeKind::japb, 0}, static_cast<int>(users), field);
}

bool NgjvMachine::offer(const ChannelMatrix& h) {
  if (run_.complete) return true;
  const auto& f = run_.field;
  const auto n = run_.users;
  if (!target_) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.at(j, j) == 1) {
        ++run_.resamples;
        return false;
      }
    }
    std::vector<Residue> target(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) target[j * n + i] = f.sub(j == i ? 1 : 0, h.at(j, i));
    }
    target_.emplace(f, n, std::move(target));
    start(SlotRecord::plain(h));
    return false;
  }
  if (!std::equal(h.entries().begin(), h.entries().end(), target_->entries().begin())) {
    return false;
  }
  RoundRecord round;
  round.k = 1;
  for (std::size_t j = 0; j < n; ++j) {
    round.receivers.push_back(j);
    round.lambdas.push_back({1, 1});
  }
  accept(SlotRecord::plain(h), std::move(round));
  run_.delay = run_.slots.back().matrix.slot() - run_.start_slot;
  run_.complete = true;
  return true;
}

JapMachine::JapMachine(const Composition& a, const PrimeField& field, bool beamforming)
    : ParentMachine(beamforming ? "japb" + a.to_string() : "jap" + a.to_string(),
                    static_cast<std::size_t>(a.users()), field),
      a_(a),
      beamforming_(beamforming) {
  validate(SchemeSpec{beamforming ? SchemeKind::japb : SchemeKind::jap, a.parts(),
                      SchemeKind::japb, 0},
           a.users(), field);
}

std::vector<Residue> JapMachine::round_gains(int k, const ChannelMatrix& h) const {
  if (!beamforming_) return std::vector<Residue>(run_.users, 1);
  return beamforming_gains(run_.slots.front().matrix, h,
                           static_cast<std::size_t>(a_.partial_sum(k - 1)));
}

bool JapMachine::offer(const ChannelMatrix& h) {
  if (run_.complete) return true;
  if (run_.slots.empty()) {
    start(SlotRecord::plain(h));
    return false;
  }
  const int k = static_cast<int>(run_.rounds.size()) + 1;
  const auto first = static_cast<std::size_t>(a_.partial_sum(k - 1));
  const auto last = static_cast<std::size_t>(a_.partial_sum(k));

  std::vector<SlotRecord> history = run_.slots;
  history.push_back({h, round_gains(k, h)});

  RoundRecord round;
  round.k = k;
  if (beamforming_) round.beamformed = first;
  for (std::size_t j = first; j < last; ++j) {
    auto lambda = recovery_check(std::span<const SlotRecord>(history), j);
    if (!lambda) {
      if (beamforming_ && j == first) {
        throw std::logic_error("beamformed receiver failed to recover its message");
      }
      return false;
    }
    round.receivers.push_back(j);
    round.lambdas.push_back(std::move(*lambda));
  }
  accept(std::move(history.back()), std::move(round));
  if (k == a_.rounds()) {
    run_.delay = run_.slots.back().matrix.slot() - run_.start_slot;
    run_.complete = true;
  }
  return run_.complete;
}

TdmaMachine::TdmaMachine(std::size_t users, const PrimeField& field)
    : ParentMachine("tdma", users, field) {
  if (users < 1) throw std::invalid_argument("need at least one user");
}

bool TdmaMachine::offer(const ChannelMatrix& h) {
  if (run_.complete) return true;
  const auto n = run_.users;
  const auto j = run_.rounds.size();
  std::vector<Residue> gains(n, 0);
  gains[j] = 1;
  SlotRecord slot{h, std::move(gains)};

  RoundRecord round;
  round.k = static_cast<int>(j) + 1;
  round.receivers = {j};
  CoefficientVector lambda(j + 1, 0);
  lambda[j] = run_.field.inv(h.at(j, j));
  round.lambdas = {std::move(lambda)};

  if (j == 0) {
    // The first exclusive slot is both t_0 and the slot of round 1.
    run_.start_slot = h.slot();
    round.slot = h.slot();
    round.slot_index = 0;
    run_.slots = {std::move(slot)};
    verify_round(run_, round);
    run_.waits.push_back(1);
    run_.rounds.push_back(std::move(round));
  } else {
    accept(std::move(slot), std::move(round));
  }
  if (run_.rounds.size() == n) {
    run_.delay = n;
    run_.complete = true;
  }
  return run_.complete;
}

std::vector<std::vector<std::size_t>> lexicographic_subsets(int n, int m) {
  if (m < 1 || m > n) throw std::invalid_argument("need 1 <= m <= n for subsets");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(static_cast<std::size_t>(m));
  std::iota(cur.begin(), cur.end(), 0);
  for (;;) {
    out.push_back(cur);
    int i = m - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == static_cast<std::size_t>(n - m + i)) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < m; ++t) {
      cur[static_cast<std::size_t>(t)] = cur[static_cast<std::size_t>(t - 1)] + 1;
    }
  }
  return out;
}

std::unique_ptr<ParentMachine> make_parent_machine(const SchemeSpec& spec, int users,
                                                   const PrimeField& field) {
  validate(spec, users, field);
  const auto n = static_cast<std::size_t>(users);
  switch (spec.kind) {
    case SchemeKind::ngjv: return std::make_unique<NgjvMachine>(n, field);
    case SchemeKind::tdma: return std::make_unique<TdmaMachine>(n, field);
    case SchemeKind::jap:
      return std::make_unique<JapMachine>(Composition(spec.composition), field, false);
    case SchemeKind::japb:
      return std::make_unique<JapMachine>(Composition(spec.composition), field, true);
    case SchemeKind::child: break;
  }
  throw std::invalid_argument("child scheme is not a parent scheme");
}

ChildMachine::ChildMachine(const SchemeSpec& parent, int parent_users, int users,
                           const PrimeField& field)
    : m_(parent_users), n_(users) {
  validate(SchemeSpec{SchemeKind::child, parent.composition, parent.kind, parent_users}, users,
           field);
  subsets_ = lexicographic_subsets(users, parent_users);
  for (std::size_t s = 0; s < subsets_.size(); ++s) {
    machines_.push_back(make_parent_machine(parent, parent_users, field));
  }
}

bool ChildMachine::offer(const ChannelMatrix& h) {
  const auto s = static_cast<std::size_t>(offered_++ % subsets_.size());
  if (!machines_[s]->done()) machines_[s]->offer(h.submatrix(subsets_[s]));
  return done();
}

bool ChildMachine::done() const {
  return std::all_of(machines_.begin(), machines_.end(), [](const auto& m) { return m->done(); });
}

RunSummary ChildMachine::summary() const {
  RunSummary out;
  const double count = static_cast<double>(machines_.size());
  for (const auto& m : machines_) {
    const auto s = m->summary();
    out.delay += s.delay / count;
    if (out.round_waits.size() < s.round_waits.size()) out.round_waits.resize(s.round_waits.size());
    for (std::size_t k = 0; k < s.round_waits.size(); ++k) out.round_waits[k] += s.round_waits[k] / count;
    out.resamples += s.resamples;
  }
  return out;
}

ChildRun ChildMachine::child_run() const {
  ChildRun out;
  out.parent_users = m_;
  out.users = n_;
  out.subsets = subsets_;
  for (const auto& m : machines_) out.runs.push_back(m->run());
  return out;
}

bool ChildRun::complete() const {
  return !runs.empty() &&
         std::all_of(runs.begin(), runs.end(), [](const SchemeRun& r) { return r.complete; });
}

std::unique_ptr<SchemeMachine> make_machine(const SchemeSpec& spec, int users,
                                            const PrimeField& field) {
  if (spec.kind == SchemeKind::child) {
    return std::make_unique<ChildMachine>(
        SchemeSpec{spec.parent, spec.composition, SchemeKind::japb, 0}, spec.parent_users, users,
        field);
  }
  return make_parent_machine(spec, users, field);
}

std::uint64_t drive(SchemeMachine& machine, ChannelStream& stream, std::uint64_t max_slots) {
  std::uint64_t used = 0;
  while (!machine.done()) {
    if (max_slots != 0 && used >= max_slots) {
      throw SlotCapExceeded("run did not complete within " + std::to_string(max_slots) + " slots");
    }
    machine.offer(stream.next());
    ++used;
  }
  return used;
}

namespace {

// Numbers the given H0 as slot 0 and the stream's matrices from slot 1 on.
class AfterFirstSlot final : public ChannelStream {
 public:
  explicit AfterFirstSlot(ChannelStream& inner) : inner_(inner) {}
  ChannelMatrix next() override { return inner_.next().with_slot(++slot_); }
  std::uint64_t slots_drawn() const override { return slot_; }

 private:
  ChannelStream& inner_;
  std::uint64_t slot_ = 0;
};

SchemeRun run_parent(ParentMachine& machine, const ChannelMatrix& h0, ChannelStream& stream,
                     std::uint64_t max_slots) {
  machine.offer(h0.with_slot(0));
  AfterFirstSlot shifted(stream);
  drive(machine, shifted, max_slots);
  return machine.run();
}

}  // namespace

SchemeRun ngjv_run(const ChannelMatrix& h0, ChannelStream& stream, std::uint64_t max_slots) {
  NgjvMachine machine(h0.users(), h0.field());
  return run_parent(machine, h0, stream, max_slots);
}

SchemeRun jap_run(const Composition& a, const ChannelMatrix& h0, ChannelStream& stream,
                  std::uint64_t max_slots) {
  JapMachine machine(a, h0.field(), false);
  return run_parent(machine, h0, stream, max_slots);
}

SchemeRun japb_run(const Composition& a, const ChannelMatrix& h0, ChannelStream& stream,
                   std::uint64_t max_slots) {
  JapMachine machine(a, h0.field(), true);
  return run_parent(machine, h0, stream, max_slots);
}

SchemeRun tdma_run(std::size_t users, ChannelStream& stream) {
  const auto first = stream.next();
  TdmaMachine machine(users, first.field());
  machine.offer(first);
  drive(machine, stream);
  return machine.run();
}

ChildRun child_run(const SchemeSpec& parent, int parent_users, int users, ChannelStream& stream,
                   std::uint64_t max_slots) {
  const auto first = stream.next();
  ChildMachine machine(parent, parent_users, users, first.field());
  machine.offer(first);
  drive(machine, stream, max_slots);
  return machine.child_run();
}

// ---------------------------------------------------------------------------
// Messages

MessageBank MessageBank::transmit(const SchemeRun& run, std::vector<FieldVector> messages) {
  if (messages.size() != run.users) throw std::invalid_argument("need one message per user");
  const auto& f = run.field;
  const auto length = messages.front().size();
  for (const auto& w : messages) {
    if (!(w.field() == f) || w.size() != length) {
      throw std::invalid_argument("messages must share the run's field and one length");
    }
  }
  MessageBank bank;
  bank.messages_ = std::move(messages);
  for (const auto& slot : run.slots) {
    std::vector<FieldVector> per_receiver;
    for (std::size_t j = 0; j < run.users; ++j) {
      FieldVector y(f, length);
      for (std::size_t i = 0; i < run.users; ++i) y.axpy(slot.effective(j, i), bank.messages_[i]);
      per_receiver.push_back(std::move(y));
    }
    bank.pseudo_.push_back(std::move(per_receiver));
  }
  return bank;
}

const FieldVector& MessageBank::pseudomessage(std::size_t slot_index, std::size_t receiver) const {
  return pseudo_.at(slot_index).at(receiver);
}

bool MessageBank::consistent(const SchemeRun& run) const {
  if (pseudo_.size() != run.slots.size()) return false;
  const auto recomputed = transmit(run, messages_);
  return recomputed.pseudo_ == pseudo_;
}

void MessageBank::corrupt(std::size_t slot_index, std::size_t receiver, std::size_t symbol) {
  auto& y = pseudo_.at(slot_index).at(receiver);
  y.set(symbol, y.raw(symbol) + 1);
}

std::vector<FieldVector> random_messages(std::size_t users, const PrimeField& field,
                                         std::size_t length, Rng& rng) {
  std::vector<FieldVector> out;
  for (std::size_t i = 0; i < users; ++i) {
    std::vector<Residue> symbols(length);
    for (auto& s : symbols) s = static_cast<Residue>(rng.uniform_below(field.q()));
    out.emplace_back(field, std::move(symbols));
  }
  return out;
}

std::vector<FieldVector> decode(const SchemeRun& run, const MessageBank& bank) {
  if (!run.complete) throw IncompleteRun("cannot decode an incomplete " + run.scheme + " run");
  const auto& f = run.field;
  const auto length = bank.messages().front().size();
  std::vector<std::optional<FieldVector>> decoded(run.users);
  for (const auto& round : run.rounds) {
    for (std::size_t r = 0; r < round.receivers.size(); ++r) {
      const auto j = round.receivers[r];
      FieldVector w(f, length);
      for (std::size_t m = 0; m < round.lambdas[r].size(); ++m) {
        w.axpy(round.lambdas[r][m], bank.pseudomessage(m, j));
      }
      decoded[j] = std::move(w);
    }
  }
  std::vector<FieldVector> out;
  for (std::size_t j = 0; j < run.users; ++j) {
    if (!decoded[j]) throw IncompleteRun("receiver " + std::to_string(j) + " was never served");
    out.push_back(std::move(*decoded[j]));
  }
  return out;
}

}  // namespace ergodic_align
