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

// Ergodic finite-field fading channel: IID uniform nonzero fading matrices,
// the point-mass/uniform noise mixture and the rate bookkeeping around it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ergodic_align/gfq.hpp"
#include "ergodic_align/rational.hpp"
#include "ergodic_align/rng.hpp"

namespace ergodic_align {

/// n x n fading matrix for one time slot. Entry (j, i) is the coefficient from
/// transmitter i to receiver j. Every entry is nonzero.
class ChannelMatrix {
 public:
  /// Row-major entries; throws std::invalid_argument on a zero entry or a
  /// size that is not n*n.
  ChannelMatrix(const PrimeField& field, std::size_t n, std::vector<Residue> entries,
                std::uint64_t slot = 0);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t users() const noexcept { return n_; }
  std::uint64_t slot() const noexcept { return slot_; }
  Residue at(std::size_t receiver, std::size_t transmitter) const {
    return entries_[receiver * n_ + transmitter];
  }
  std::span<const Residue> row(std::size_t receiver) const {
    return std::span<const Residue>(entries_).subspan(receiver * n_, n_);
  }
  std::span<const Residue> entries() const noexcept { return entries_; }

  /// Interference vector of `receiver`: its row with the own-link entry removed.
  FieldVector interference(std::size_t receiver) const;

  /// Restriction to the given users (rows and columns), same slot.
  ChannelMatrix submatrix(std::span<const std::size_t> users) const;
  ChannelMatrix with_slot(std::uint64_t slot) const;

  friend bool operator==(const ChannelMatrix& a, const ChannelMatrix& b) {
    return a.field_ == b.field_ && a.n_ == b.n_ && a.entries_ == b.entries_;
  }

 private:
  PrimeField field_;
  std::size_t n_;
  std::vector<Residue> entries_;
  std::uint64_t slot_;
};

/// Each of the n^2 entries independent and uniform on {1, ..., q-1}.
ChannelMatrix draw_matrix(std::size_t n, const PrimeField& field, Rng& rng,
                          std::uint64_t slot = 0);

/// Z = 0 with probability 1 - rho, otherwise uniform on the q-1 nonzero values.
class NoiseModel {
 public:
  NoiseModel(const PrimeField& field, double rho);

  const PrimeField& field() const noexcept { return field_; }
  double rho() const noexcept { return rho_; }
  double mass(Residue z) const;
  Residue sample(Rng& rng) const;

 private:
  PrimeField field_;
  double rho_;
};

/// Shannon entropy of the noise, in bits.
double entropy_bits(const NoiseModel& noise);
/// D(Z) = log2 q - H(Z): the single-user capacity, in bits per channel use.
double relative_entropy(const NoiseModel& noise);

/// DOF of a scheme spreading each message over K+1 matched slots: 1/(K+1).
Rational scheme_dof(int extra_rounds);
/// DOF of an m-user parent with K extra rounds time-shared over n users:
/// m / (n (K+1)).
Rational child_dof(int parent_users, int network_users, int extra_rounds);

struct RateQuantities {
  double d_of_z;  // bits
  double dof;
  double rate() const { return dof * d_of_z; }
};

RateQuantities rate_quantities(const NoiseModel& noise, const Rational& dof);

/// Source of fading matrices, one per slot, slots numbered 0, 1, 2, ...
class ChannelStream {
 public:
  virtual ~ChannelStream() = default;
  virtual ChannelMatrix next() = 0;
  virtual std::uint64_t slots_drawn() const = 0;
};

/// IID uniform stream.
class RandomChannelStream final : public ChannelStream {
 public:
  RandomChannelStream(std::size_t n, const PrimeField& field, Rng rng);
  ChannelMatrix next() override;
  std::uint64_t slots_drawn() const override { return slot_; }

 private:
  std::size_t n_;
  PrimeField field_;
  Rng rng_;
  std::uint64_t slot_ = 0;
};

/// Replays fixed matrices (renumbering their slots) and then, if a fallback is
/// given, continues with it. Throws std::out_of_range once exhausted.
class ScriptedChannelStream final : public ChannelStream {
 public:
  explicit ScriptedChannelStream(std::vector<ChannelMatrix> script,
                                 ChannelStream* fallback = nullptr);
  ChannelMatrix next() override;
  std::uint64_t slots_drawn() const override { return slot_; }

 private:
  std::vector<ChannelMatrix> script_;
  ChannelStream* fallback_;
  std::size_t pos_ = 0;
  std::uint64_t slot_ = 0;
};

}  // namespace ergodic_align
