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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "ergodic_align/analysis.hpp"

namespace ergodic_align {

namespace {

constexpr std::uint64_t kChunk = 256;

RunSummary one_trial(const MonteCarloConfig& config, const PrimeField& field, std::uint64_t index) {
  RandomChannelStream stream(static_cast<std::size_t>(config.users), field,
                             Rng::stream(config.seed, index));
  auto machine = make_machine(config.scheme, config.users, field);
  drive(*machine, stream, config.max_slots);
  return machine->summary();
}

}  // namespace

std::vector<RunSummary> simulate_trials(const MonteCarloConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  const PrimeField field(config.q);
  validate(config.scheme, config.users, field);

  std::vector<RunSummary> out(config.trials);
  unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, (config.trials + kChunk - 1) / kChunk));

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto work = [&] {
    try {
      while (!stop.load(std::memory_order_relaxed)) {
        const auto begin = next.fetch_add(kChunk);
        if (begin >= config.trials) return;
        const auto end = std::min(config.trials, begin + kChunk);
        config.deadline.check("monte_carlo");
        for (auto i = begin; i < end; ++i) out[i] = one_trial(config, field, i);
      }
    } catch (...) {
      std::lock_guard lock(failure_lock);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

DelayStats summarize(const MonteCarloConfig& config, std::span<const RunSummary> runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to summarize");
  DelayStats s;
  s.scheme = config.scheme.label();
  s.users = config.users;
  s.q = config.q;
  s.trials = runs.size();
  s.seed = config.seed;
  s.dof = scheme_dof(config.scheme, config.users);
  s.exponent = scheme_exponent(config.scheme, config.users);

  const double count = static_cast<double>(runs.size());
  auto mean_and_error = [&](auto value) {
    double sum = 0.0;
    for (const auto& r : runs) sum += value(r);
    const double mean = sum / count;
    if (runs.size() < 2) return std::pair{mean, 0.0};
    double squares = 0.0;
    for (const auto& r : runs) squares += (value(r) - mean) * (value(r) - mean);
    return std::pair{mean, std::sqrt(squares / (count - 1.0) / count)};
  };

  std::tie(s.mean_delay, s.std_error) = mean_and_error([](const RunSummary& r) { return r.delay; });
  std::size_t rounds = 0;
  for (const auto& r : runs) rounds = std::max(rounds, r.round_waits.size());
  for (std::size_t k = 0; k < rounds; ++k) {
    const auto [m, e] = mean_and_error([k](const RunSummary& r) {
      return k < r.round_waits.size() ? r.round_waits[k] : 0.0;
    });
    s.round_means.push_back(m);
    s.round_std_errors.push_back(e);
  }
  for (const auto& r : runs) s.resamples += r.resamples;
  return s;
}

DelayStats monte_carlo(const MonteCarloConfig& config) {
  const auto runs = simulate_trials(config);
  return summarize(config, runs);
}

namespace {

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

ExponentFit fit_exponent(std::span<const std::pair<double, double>> sweep) {
  std::set<double> distinct;
  for (const auto& [q, d] : sweep) {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("field sizes must exceed 1");
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("mean delays must be positive");
    distinct.insert(q);
  }
  if (distinct.size() < 3) throw std::invalid_argument("fit needs at least 3 distinct field sizes");

  ExponentFit fit;
  std::vector<double> lq, lqm1, ld;
  for (const auto& [q, d] : sweep) {
    fit.q_values.push_back(q);
    fit.mean_delays.push_back(d);
    lq.push_back(std::log(q));
    lqm1.push_back(std::log(q - 1.0));
    ld.push_back(std::log(d));
  }
  std::tie(fit.slope, fit.intercept) = least_squares(lq, ld);
  std::tie(fit.slope_qm1, fit.intercept_qm1) = least_squares(lqm1, ld);
  return fit;
}

double two_point_exponent(double q1, double d1, double q2, double d2) {
  if (!(q1 > 1.0) || !(q2 > 1.0) || q1 == q2) {
    throw std::invalid_argument("two-point estimate needs two distinct field sizes above 1");
  }
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::invalid_argument("delays must be positive");
  return std::log(d2 / d1) / std::log(q2 / q1);
}

}  // namespace ergodic_align
