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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ergodic_align/analysis.hpp"
#include "ergodic_align/cli.hpp"

namespace py = pybind11;
using namespace ergodic_align;

namespace {

using Matrix = std::vector<std::vector<std::int64_t>>;

py::object fraction(const Rational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_string(r));
}

std::vector<FieldVector> vectors(const Matrix& rows, const PrimeField& f) {
  std::vector<FieldVector> out;
  for (const auto& row : rows) {
    std::vector<Residue> entries;
    for (auto v : row) entries.push_back(f.reduce(v));
    out.emplace_back(f, std::move(entries));
  }
  return out;
}

ChannelMatrix matrix(const Matrix& rows, const PrimeField& f) {
  std::vector<Residue> entries;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("channel matrix must be square");
    for (auto v : row) entries.push_back(f.reduce(v));
  }
  return ChannelMatrix(f, rows.size(), std::move(entries));
}

Matrix rows_of(const ChannelMatrix& h) {
  Matrix out(h.users(), std::vector<std::int64_t>(h.users()));
  for (std::size_t j = 0; j < h.users(); ++j) {
    for (std::size_t i = 0; i < h.users(); ++i) out[j][i] = h.at(j, i);
  }
  return out;
}

std::vector<SlotRecord> history_of(const std::vector<Matrix>& slots,
                                   const std::vector<std::vector<std::int64_t>>& gains,
                                   const PrimeField& f) {
  if (!gains.empty() && gains.size() != slots.size()) {
    throw std::invalid_argument("give one gain vector per slot or none");
  }
  std::vector<SlotRecord> out;
  for (std::size_t t = 0; t < slots.size(); ++t) {
    auto h = matrix(slots[t], f).with_slot(t);
    if (gains.empty()) {
      out.push_back(SlotRecord::plain(h));
    } else {
      std::vector<Residue> g;
      for (auto v : gains[t]) g.push_back(f.reduce(v));
      out.push_back(SlotRecord{std::move(h), std::move(g)});
    }
  }
  if (out.empty()) throw std::invalid_argument("history must hold at least one slot");
  return out;
}

SchemeSpec spec_of(const std::string& scheme, const std::vector<int>& a, const std::string& parent,
                   int parent_users) {
  SchemeSpec s;
  s.kind = parse_scheme_kind(scheme);
  s.composition = a;
  s.parent = parse_scheme_kind(parent);
  s.parent_users = parent_users;
  return s;
}

py::dict optimum_dict(const Optimum& o) {
  py::dict d;
  d["n"] = o.users;
  d["K"] = o.rounds;
  d["exponent"] = o.exponent;
  d["argmin_count"] = py::int_(py::str(o.argmin_count.str()));
  py::list argmins;
  for (const auto& a : o.argmins) argmins.append(py::cast(a.parts()));
  d["argmins"] = argmins;
  d["unique"] = o.unique();
  d["truncated"] = o.truncated();
  return d;
}

py::dict stats_dict(const DelayStats& s) {
  py::dict d;
  d["scheme"] = s.scheme;
  d["n"] = s.users;
  d["q"] = s.q;
  d["trials"] = s.trials;
  d["seed"] = s.seed;
  d["mean_delay"] = s.mean_delay;
  d["std_error"] = s.std_error;
  d["round_means"] = s.round_means;
  d["round_std_errors"] = s.round_std_errors;
  d["resamples"] = s.resamples;
  d["dof"] = fraction(s.dof);
  d["exponent"] = s.exponent;
  return d;
}

py::dict run_dict(const SchemeRun& run) {
  py::dict d;
  d["scheme"] = run.scheme;
  d["n"] = run.users;
  d["delay"] = run.delay;
  d["waits"] = run.waits;
  d["resamples"] = run.resamples;
  d["complete"] = run.complete;
  py::list slots;
  for (const auto& s : run.slots) slots.append(s.matrix.slot());
  d["slots"] = slots;
  return d;
}

RegimeParams regime(const std::optional<Rational>& alpha, const std::optional<Rational>& beta) {
  if (alpha.has_value() == beta.has_value()) throw std::invalid_argument("give exactly one of alpha, beta");
  return alpha ? RegimeParams::alpha(*alpha) : RegimeParams::beta(*beta);
}

std::optional<Rational> rational_arg(const py::object& v) {
  if (v.is_none()) return std::nullopt;
  return parse_rational(py::str(v).cast<std::string>());
}

py::list regime_rows(const std::vector<RegimeRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["n"] = r.users;
    d["parameter"] = r.parameter;
    d["exact"] = r.exact;
    d["predicted_lower"] = fraction(r.predicted_lower);
    d["predicted_upper"] = fraction(r.predicted_upper);
    d["ratio"] = r.ratio;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ergodic interference alignment over finite fields";

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<SlotCapExceeded>(m, "SlotCapExceeded", PyExc_RuntimeError);
  py::register_exception<EnumerationTooLarge>(m, "EnumerationTooLarge", PyExc_ValueError);

  // Field arithmetic and linear algebra.
  m.def("is_prime", &is_prime, py::arg("value"));
  m.def("add", [](std::int64_t a, std::int64_t b, std::uint32_t q) {
    const PrimeField f(q);
    return add(FieldElement(f, a), FieldElement(f, b)).value();
  }, py::arg("a"), py::arg("b"), py::arg("q"));
  m.def("mul", [](std::int64_t a, std::int64_t b, std::uint32_t q) {
    const PrimeField f(q);
    return mul(FieldElement(f, a), FieldElement(f, b)).value();
  }, py::arg("a"), py::arg("b"), py::arg("q"));
  m.def("mul_inv", [](std::int64_t a, std::uint32_t q) {
    return mul_inv(FieldElement(PrimeField(q), a)).value();
  }, py::arg("a"), py::arg("q"));
  m.def("linear_dependence", [](const Matrix& v, std::uint32_t q) {
    return linear_dependence(vectors(v, PrimeField(q)));
  }, py::arg("vectors"), py::arg("q"));
  m.def("rank", [](const Matrix& v, std::uint32_t q) {
    return rank(vectors(v, PrimeField(q)));
  }, py::arg("vectors"), py::arg("q"));

  // Channel.
  m.def("draw_matrix", [](std::size_t n, std::uint32_t q, std::uint64_t seed) {
    Rng rng(seed);
    return rows_of(draw_matrix(n, PrimeField(q), rng));
  }, py::arg("n"), py::arg("q"), py::arg("seed"));
  m.def("relative_entropy", [](std::uint32_t q, double rho) {
    return relative_entropy(NoiseModel(PrimeField(q), rho));
  }, py::arg("q"), py::arg("rho"));
  m.def("scheme_dof", [](int k) { return fraction(scheme_dof(k)); }, py::arg("K"));

  // Schemes.
  m.def("recovery_check", [](const std::vector<Matrix>& slots, std::size_t receiver,
                             std::uint32_t q, const std::vector<std::vector<std::int64_t>>& gains) {
    const auto history = history_of(slots, gains, PrimeField(q));
    return recovery_check(std::span<const SlotRecord>(history), receiver);
  }, py::arg("history"), py::arg("receiver"), py::arg("q"),
        py::arg("gains") = std::vector<std::vector<std::int64_t>>{});
  m.def("run_scheme", [](const std::string& scheme, int n, std::uint32_t q, std::uint64_t seed,
                         const std::vector<int>& a, const std::string& parent, int parent_users,
                         std::uint64_t max_slots) {
    const PrimeField f(q);
    const auto spec = spec_of(scheme, a, parent, parent_users);
    validate(spec, n, f);
    RandomChannelStream stream(static_cast<std::size_t>(n), f, Rng(seed));
    Rng messages(seed ^ 0x9E3779B97F4A7C15ull);
    std::vector<SchemeRun> runs;
    if (spec.kind == SchemeKind::child) {
      const SchemeSpec inner{spec.parent, spec.composition, SchemeKind::japb, 0};
      runs = child_run(inner, parent_users, n, stream, max_slots).runs;
    } else {
      auto machine = make_parent_machine(spec, n, f);
      drive(*machine, stream, max_slots);
      runs = {machine->run()};
    }
    py::list out;
    for (const auto& run : runs) {
      auto d = run_dict(run);
      const auto bank = MessageBank::transmit(run, random_messages(run.users, f, 8, messages));
      d["decoded"] = decode(run, bank) == bank.messages();
      out.append(d);
    }
    return out;
  }, py::arg("scheme"), py::arg("n"), py::arg("q"), py::arg("seed"),
        py::arg("a") = std::vector<int>{}, py::arg("parent") = "japb",
        py::arg("parent_users") = 0, py::arg("max_slots") = 100'000'000);

  // Exponents and the optimizer.
  m.def("jap_exponent", [](const std::vector<int>& a) {
    const auto e = jap_exponent(Composition(a));
    return std::pair{e.per_round, e.overall};
  }, py::arg("a"));
  m.def("japb_exponent", [](const std::vector<int>& a) {
    const auto e = japb_exponent(Composition(a));
    return std::pair{e.per_round, e.overall};
  }, py::arg("a"));
  m.def("optimize", [](int n, int k, std::size_t max_listed) {
    return optimum_dict(optimize(n, k, max_listed));
  }, py::arg("n"), py::arg("K"), py::arg("max_listed") = 64);
  m.def("bounds", [](int n, int k) {
    const auto b = bounds(n, k);
    return py::make_tuple(fraction(b.lower), fraction(b.upper));
  }, py::arg("n"), py::arg("K"));
  m.def("harmonic_bounds", [](int n, int k) {
    const auto b = harmonic_bounds(n, k);
    return py::make_tuple(fraction(b.sum), fraction(b.lower),
                          b.upper ? fraction(*b.upper) : py::object(py::none()));
  }, py::arg("n"), py::arg("K"));

  // Exact oracles.
  m.def("exact_round_probability", [](const std::vector<int>& a, int k,
                                      const std::vector<Matrix>& history, std::uint32_t q,
                                      bool beamformed, const std::string& method,
                                      const std::vector<std::vector<std::int64_t>>& gains) {
    const auto slots = history_of(history, gains, PrimeField(q));
    EnumerationMethod em;
    if (method == "full") em = EnumerationMethod::full_matrix;
    else if (method == "per-receiver") em = EnumerationMethod::per_receiver;
    else throw std::invalid_argument("method must be full or per-receiver");
    return fraction(exact_round_probability(Composition(a), k, slots, beamformed, em));
  }, py::arg("a"), py::arg("k"), py::arg("history"), py::arg("q"), py::arg("beamformed") = true,
        py::arg("method") = "per-receiver",
        py::arg("gains") = std::vector<std::vector<std::int64_t>>{});
  m.def("lemma3_failure", [](std::uint32_t q, int l) { return fraction(lemma3_failure(q, l)); },
        py::arg("q"), py::arg("L"));
  m.def("lemma3_failure_unsigned",
        [](std::uint32_t q, int l) { return fraction(lemma3_failure_unsigned(q, l)); },
        py::arg("q"), py::arg("L"));
  m.def("lemma3_convolution",
        [](std::uint32_t q, int l) { return fraction(lemma3_convolution(q, l)); },
        py::arg("q"), py::arg("L"));
  m.def("span_fullness", [](const Matrix& basis, std::uint32_t q) {
    const auto s = span_fullness(vectors(basis, PrimeField(q)));
    return py::make_tuple(fraction(s.proportion), fraction(s.expansion));
  }, py::arg("basis"), py::arg("q"));

  // Simulation.
  m.def("monte_carlo", [](const std::string& scheme, int n, std::uint32_t q, std::uint64_t trials,
                          std::uint64_t seed, const std::vector<int>& a, const std::string& parent,
                          int parent_users, unsigned threads, std::uint64_t max_slots) {
    MonteCarloConfig c;
    c.scheme = spec_of(scheme, a, parent, parent_users);
    c.users = n;
    c.q = q;
    c.trials = trials;
    c.seed = seed;
    c.threads = threads;
    c.max_slots = max_slots;
    DelayStats s;
    {
      py::gil_scoped_release release;
      s = monte_carlo(c);
    }
    return stats_dict(s);
  }, py::arg("scheme"), py::arg("n"), py::arg("q"), py::arg("trials"), py::arg("seed") = 1,
        py::arg("a") = std::vector<int>{}, py::arg("parent") = "japb", py::arg("parent_users") = 0,
        py::arg("threads") = 0, py::arg("max_slots") = 100'000'000);
  m.def("fit_exponent", [](const std::vector<std::pair<double, double>>& sweep) {
    const auto fit = fit_exponent(sweep);
    py::dict d;
    d["slope"] = fit.slope;
    d["intercept"] = fit.intercept;
    d["slope_qm1"] = fit.slope_qm1;
    d["intercept_qm1"] = fit.intercept_qm1;
    return d;
  }, py::arg("sweep"));
  m.def("two_point_exponent", &two_point_exponent, py::arg("q1"), py::arg("d1"), py::arg("q2"),
        py::arg("d2"));

  // Reports.
  m.def("best_scheme_table", [](int n_min, int n_max) {
    py::list out;
    for (const auto& c : best_scheme_table(n_min, n_max)) {
      py::dict d;
      d["n"] = c.users;
      d["K"] = c.rounds;
      d["dof"] = fraction(c.dof);
      d["exponent"] = c.exponent;
      d["argmin"] = c.argmin.parts();
      d["unique"] = c.unique;
      d["tdma_equivalent"] = c.tdma_equivalent;
      out.append(d);
    }
    return out;
  }, py::arg("n_min") = 3, py::arg("n_max") = 8);
  m.def("figure_points", [](int n) {
    py::list out;
    for (const auto& p : figure_points(n)) {
      py::dict d;
      d["n"] = p.users;
      d["family"] = p.family;
      d["parent_users"] = p.parent_users;
      d["rounds"] = p.rounds;
      d["composition"] = p.composition;
      d["dof"] = fraction(p.dof);
      d["exponent"] = p.exponent;
      out.append(d);
    }
    return out;
  }, py::arg("n"));
  m.def("regime_parent_sweep", [](int n_min, int n_max, const py::object& alpha, const py::object& beta) {
    return regime_rows(regime_parent_sweep(regime(rational_arg(alpha), rational_arg(beta)), n_min, n_max));
  }, py::arg("n_min"), py::arg("n_max"), py::arg("alpha") = py::none(), py::arg("beta") = py::none());
  m.def("regime_child_sweep", [](int n_min, int n_max, const py::object& alpha, const py::object& beta) {
    return regime_rows(regime_child_sweep(regime(rational_arg(alpha), rational_arg(beta)), n_min, n_max));
  }, py::arg("n_min"), py::arg("n_max"), py::arg("alpha") = py::none(), py::arg("beta") = py::none());

  // Command line.
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
