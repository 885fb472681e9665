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

// Alignment schemes as state machines over a fading-matrix stream.
//
// Every scheme consumes slots one at a time through SchemeMachine::offer. A
// parent scheme (NGJV, TDMA, JAP, JAP-B) records the slots it matched, the
// per-transmitter gains used in each of them and, for each receiver, the
// coefficients lambda that recombine its stored pseudomessages into its own
// message. A child scheme interleaves C(n, m) copies of an m-user parent.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ergodic_align/channel.hpp"
#include "ergodic_align/gfq.hpp"
#include "ergodic_align/rational.hpp"

namespace ergodic_align {

/// [a_1, ..., a_K]: positive parts summing to the user count n.
class Composition {
 public:
  explicit Composition(std::vector<int> parts);
  /// "1,3" or "[1,3]".
  static Composition parse(std::string_view text);

  int users() const noexcept { return users_; }
  int rounds() const noexcept { return static_cast<int>(parts_.size()); }
  /// a_k for 1 <= k <= K.
  int part(int k) const { return parts_.at(static_cast<std::size_t>(k - 1)); }
  /// A_k = a_1 + ... + a_k, with A_0 = 0.
  int partial_sum(int k) const;
  const std::vector<int>& parts() const noexcept { return parts_; }
  std::string to_string() const;

  friend bool operator==(const Composition&, const Composition&) = default;
  friend auto operator<=>(const Composition& a, const Composition& b) {
    return a.parts_ <=> b.parts_;
  }

 private:
  std::vector<int> parts_;
  int users_ = 0;
};

/// One matched slot together with the gain each transmitter applied to its
/// message in that slot (1 for a plain repeat, 0 for silence, a beamforming
/// factor otherwise). Receiver j's pseudomessage there is
/// sum_i h_ji * gain_i * w_i.
struct SlotRecord {
  ChannelMatrix matrix;
  std::vector<Residue> gains;

  static SlotRecord plain(const ChannelMatrix& h);
  Residue effective(std::size_t receiver, std::size_t transmitter) const;
  FieldVector effective_interference(std::size_t receiver) const;
};

/// JAP-B gains for a round whose beamformed receiver is l: transmitter i != l
/// scales by h_li[t]^-1 h_li[t_0], so l's interference repeats that of t_0;
/// transmitter l uses the negated factor so l's own term survives the
/// difference of the two pseudomessages (needs q odd).
std::vector<Residue> beamforming_gains(const ChannelMatrix& h0, const ChannelMatrix& h,
                                       std::size_t beamformed);

/// Coefficients (lambda_0..lambda_k) for receiver j with
///   sum_m lambda_m h_j^int[t_m] = 0   and   sum_m lambda_m h_jj[t_m] = 1,
/// searching the whole null space of the stacked interference vectors, or
/// nullopt when no qualifying combination exists. Throws
/// std::invalid_argument for an empty history or mismatched sizes.
std::optional<CoefficientVector> recovery_check(std::span<const ChannelMatrix> history,
                                                std::size_t receiver);
/// Same, on the gain-weighted matrices of already transmitted slots.
std::optional<CoefficientVector> recovery_check(std::span<const SlotRecord> history,
                                                std::size_t receiver);

struct RoundRecord {
  int k = 0;
  std::uint64_t slot = 0;       // t_k
  std::size_t slot_index = 0;   // position of t_k in SchemeRun::slots
  std::vector<std::size_t> receivers;
  std::vector<CoefficientVector> lambdas;  // per receiver, over slots[0..slot_index]
  std::optional<std::size_t> beamformed;   // receiver served by beamforming
};

struct SchemeRun {
  std::string scheme;
  std::size_t users = 0;
  PrimeField field{2};
  std::vector<SlotRecord> slots;  // t_0 first, then matched slots in order
  std::vector<RoundRecord> rounds;
  std::uint64_t start_slot = 0;   // t_0
  std::uint64_t delay = 0;        // t_K - t_0 (n for TDMA)
  std::vector<std::uint64_t> waits;  // t_k - t_{k-1}
  std::uint64_t resamples = 0;    // NGJV: discarded H0 draws
  bool complete = false;
};

/// Checks the recovery identities of `round` against `run.slots`; throws
/// std::logic_error on any violation.
void verify_round(const SchemeRun& run, const RoundRecord& round);

enum class SchemeKind { ngjv, tdma, jap, japb, child };

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(std::string_view name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::ngjv;
  std::vector<int> composition;           // jap/japb, or the child's parent
  SchemeKind parent = SchemeKind::japb;   // child only
  int parent_users = 0;                   // child only: m

  std::string label() const;
};

/// DOF of `spec` run on n users.
Rational scheme_dof(const SchemeSpec& spec, int users);
/// Throws std::invalid_argument if `spec` cannot run on n users over `field`.
void validate(const SchemeSpec& spec, int users, const PrimeField& field);

struct RunSummary {
  double delay = 0.0;
  std::vector<double> round_waits;
  std::uint64_t resamples = 0;
};

class SchemeMachine {
 public:
  virtual ~SchemeMachine() = default;
  /// Consumes one slot of the stream; returns true once the run is complete.
  virtual bool offer(const ChannelMatrix& h) = 0;
  virtual bool done() const = 0;
  virtual RunSummary summary() const = 0;
};

/// Base for the single-network schemes.
class ParentMachine : public SchemeMachine {
 public:
  const SchemeRun& run() const noexcept { return run_; }
  bool done() const override { return run_.complete; }
  RunSummary summary() const override;

 protected:
  ParentMachine(std::string name, std::size_t users, const PrimeField& field);
  void start(const SlotRecord& first);
  void accept(SlotRecord slot, RoundRecord round);
  SchemeRun run_;
};

/// Waits for I - H[t_0]. H[t_0] with some h_jj = 1 would make the target
/// contain a zero entry; such draws are discarded and counted in `resamples`.
class NgjvMachine final : public ParentMachine {
 public:
  NgjvMachine(std::size_t users, const PrimeField& field);
  bool offer(const ChannelMatrix& h) override;

 private:
  std::optional<ChannelMatrix> target_;
};

/// JAP(a) and, with beamforming, JAP-B(a).
class JapMachine final : public ParentMachine {
 public:
  JapMachine(const Composition& a, const PrimeField& field, bool beamforming);
  bool offer(const ChannelMatrix& h) override;

  /// Gains used in round k for candidate `h`: all ones for JAP; for JAP-B the
  /// receiver l = A_{k-1}+1 sees the interference of t_0 again, and its own
  /// transmitter is sign-flipped so its desired term does not cancel.
  std::vector<Residue> round_gains(int k, const ChannelMatrix& h) const;
  const Composition& composition() const noexcept { return a_; }
  bool beamforming() const noexcept { return beamforming_; }

 private:
  Composition a_;
  bool beamforming_;
};

/// One exclusive slot per user.
class TdmaMachine final : public ParentMachine {
 public:
  TdmaMachine(std::size_t users, const PrimeField& field);
  bool offer(const ChannelMatrix& h) override;
};

struct ChildRun {
  int parent_users = 0;
  int users = 0;
  std::vector<std::vector<std::size_t>> subsets;  // lexicographic m-subsets
  std::vector<SchemeRun> runs;                    // local indices, global slots
  bool complete() const;
};

/// Round-robin over the C(n, m) subnetworks: global slot g goes to subset
/// g mod C(n, m); silent users contribute nothing.
class ChildMachine final : public SchemeMachine {
 public:
  ChildMachine(const SchemeSpec& parent, int parent_users, int users, const PrimeField& field);
  bool offer(const ChannelMatrix& h) override;
  bool done() const override;
  /// Delay and waits averaged over subnetworks, in global slots.
  RunSummary summary() const override;
  ChildRun child_run() const;

 private:
  int m_;
  int n_;
  std::vector<std::vector<std::size_t>> subsets_;
  std::vector<std::unique_ptr<ParentMachine>> machines_;
  std::uint64_t offered_ = 0;
};

std::unique_ptr<ParentMachine> make_parent_machine(const SchemeSpec& spec, int users,
                                                   const PrimeField& field);
std::unique_ptr<SchemeMachine> make_machine(const SchemeSpec& spec, int users,
                                            const PrimeField& field);

/// Raised when a run exceeds its slot cap.
class SlotCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feeds `stream` into `machine` until it completes; throws SlotCapExceeded
/// after `max_slots` slots (0 = unbounded).
std::uint64_t drive(SchemeMachine& machine, ChannelStream& stream, std::uint64_t max_slots = 0);

SchemeRun ngjv_run(const ChannelMatrix& h0, ChannelStream& stream, std::uint64_t max_slots = 0);
SchemeRun jap_run(const Composition& a, const ChannelMatrix& h0, ChannelStream& stream,
                  std::uint64_t max_slots = 0);
SchemeRun japb_run(const Composition& a, const ChannelMatrix& h0, ChannelStream& stream,
                   std::uint64_t max_slots = 0);
SchemeRun tdma_run(std::size_t users, ChannelStream& stream);
ChildRun child_run(const SchemeSpec& parent, int parent_users, int users, ChannelStream& stream,
                   std::uint64_t max_slots = 0);

/// All m-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> lexicographic_subsets(int n, int m);

class IncompleteRun : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Messages w_1..w_n and every receiver's pseudomessage in every slot of a run.
class MessageBank {
 public:
  static MessageBank transmit(const SchemeRun& run, std::vector<FieldVector> messages);

  const std::vector<FieldVector>& messages() const noexcept { return messages_; }
  const FieldVector& pseudomessage(std::size_t slot_index, std::size_t receiver) const;
  /// Recomputes every pseudomessage from the run's matrices and gains.
  bool consistent(const SchemeRun& run) const;
  /// Adds 1 to one symbol of one stored pseudomessage.
  void corrupt(std::size_t slot_index, std::size_t receiver, std::size_t symbol);

 private:
  std::vector<FieldVector> messages_;
  std::vector<std::vector<FieldVector>> pseudo_;  // [slot_index][receiver]
};

std::vector<FieldVector> random_messages(std::size_t users, const PrimeField& field,
                                         std::size_t length, Rng& rng);

/// Each receiver's lambda-combination of its stored pseudomessages.
std::vector<FieldVector> decode(const SchemeRun& run, const MessageBank& bank);

}  // namespace ergodic_align
