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

#include "ergodic_align/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ergodic_align {

ChannelMatrix::ChannelMatrix(const PrimeField& field, std::size_t n, std::vector<Residue> entries,
                             std::uint64_t slot)
    : field_(field), n_(n), entries_(std::move(entries)), slot_(slot) {
  if (n_ == 0) throw std::invalid_argument("channel matrix needs at least one user");
  if (entries_.size() != n_ * n_) {
    throw std::invalid_argument("channel matrix has " + std::to_string(entries_.size()) +
                                " entries, expected " + std::to_string(n_ * n_));
  }
  for (auto& e : entries_) {
    e = field_.reduce(e);
    if (e == 0) throw std::invalid_argument("channel matrix entries must be nonzero");
  }
}

FieldVector ChannelMatrix::interference(std::size_t receiver) const {
  std::vector<Residue> v;
  v.reserve(n_ - 1);
  for (std::size_t i = 0; i < n_; ++i) {
    if (i != receiver) v.push_back(at(receiver, i));
  }
  return FieldVector(field_, std::move(v));
}

ChannelMatrix ChannelMatrix::submatrix(std::span<const std::size_t> users) const {
  std::vector<Residue> sub;
  sub.reserve(users.size() * users.size());
  for (auto j : users) {
    for (auto i : users) sub.push_back(at(j, i));
  }
  return ChannelMatrix(field_, users.size(), std::move(sub), slot_);
}

ChannelMatrix ChannelMatrix::with_slot(std::uint64_t slot) const {
  ChannelMatrix copy = *this;
  copy.slot_ = slot;
  return copy;
}

ChannelMatrix draw_matrix(std::size_t n, const PrimeField& field, Rng& rng, std::uint64_t slot) {
  std::vector<Residue> entries(n * n);
  for (auto& e : entries) e = static_cast<Residue>(1 + rng.uniform_below(field.q() - 1));
  return ChannelMatrix(field, n, std::move(entries), slot);
}

NoiseModel::NoiseModel(const PrimeField& field, double rho) : field_(field), rho_(rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("noise rho must lie in [0, 1]");
}

double NoiseModel::mass(Residue z) const {
  if (z >= field_.q()) throw std::invalid_argument("noise value outside the field");
  return z == 0 ? 1.0 - rho_ : rho_ / (field_.q() - 1);
}

Residue NoiseModel::sample(Rng& rng) const {
  if (rng.uniform01() >= rho_) return 0;
  return static_cast<Residue>(1 + rng.uniform_below(field_.q() - 1));
}

double entropy_bits(const NoiseModel& noise) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  const double q1 = noise.field().q() - 1.0;
  return term(1.0 - noise.rho()) + q1 * term(noise.rho() / q1);
}

double relative_entropy(const NoiseModel& noise) {
  const double d = std::log2(static_cast<double>(noise.field().q())) - entropy_bits(noise);
  return d < 0.0 ? 0.0 : d;  // clamp rounding below zero at the uniform point
}

Rational scheme_dof(int extra_rounds) {
  if (extra_rounds < 0) throw std::invalid_argument("K must be non-negative");
  return make_rational(1, extra_rounds + 1);
}

Rational child_dof(int parent_users, int network_users, int extra_rounds) {
  if (parent_users < 1 || parent_users > network_users) {
    throw std::invalid_argument("child scheme needs 1 <= m <= n");
  }
  return make_rational(parent_users, network_users) * scheme_dof(extra_rounds);
}

RateQuantities rate_quantities(const NoiseModel& noise, const Rational& dof) {
  return {relative_entropy(noise), to_double(dof)};
}

RandomChannelStream::RandomChannelStream(std::size_t n, const PrimeField& field, Rng rng)
    : n_(n), field_(field), rng_(rng) {}

ChannelMatrix RandomChannelStream::next() { return draw_matrix(n_, field_, rng_, slot_++); }

ScriptedChannelStream::ScriptedChannelStream(std::vector<ChannelMatrix> script,
                                             ChannelStream* fallback)
    : script_(std::move(script)), fallback_(fallback) {}

ChannelMatrix ScriptedChannelStream::next() {
  if (pos_ < script_.size()) return script_[pos_++].with_slot(slot_++);
  if (fallback_ == nullptr) throw std::out_of_range("scripted channel stream exhausted");
  return fallback_->next().with_slot(slot_++);
}

}  // namespace ergodic_align
