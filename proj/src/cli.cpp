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

// Every subcommand builds a Report (named columns, typed cells) that is then
// rendered as CSV or JSON. Nothing is written until the report is complete.

#include "ergodic_align/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <variant>

#include "ergodic_align/analysis.hpp"

namespace ergodic_align {

namespace {

using Cell = std::variant<std::monostate, std::string, long long, std::uint64_t, double, bool>;
using Row = std::vector<std::pair<std::string, Cell>>;

struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(Row row) {
    std::vector<std::string> names;
    std::vector<Cell> cells;
    for (auto& [name, cell] : row) {
      names.push_back(name);
      cells.push_back(std::move(cell));
    }
    if (rows.empty() && columns.empty()) {
      columns = std::move(names);
    } else if (names != columns) {
      throw std::logic_error("report rows disagree on columns");
    }
    rows.push_back(std::move(cells));
  }
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

std::string render_csv(const Report& report) {
  std::string out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(report.columns[i]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["command"] = report.command;
  doc["columns"] = report.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[report.columns[i]] = nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) {
                obj[report.columns[i]] = v;
              } else {
                obj[report.columns[i]] = nullptr;
              }
            } else {
              obj[report.columns[i]] = v;
            }
          },
          row[i]);
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

void add_rational(Row& row, const std::string& name, const Rational& r) {
  row.emplace_back(name, to_string(r));
  row.emplace_back(name + "_float", to_double(r));
}

// ---------------------------------------------------------------------------
// Options

struct Options {
  // shared
  std::string format = "csv";
  std::string out_path;
  double budget_seconds = 0.0;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  // instance
  std::vector<int> n;
  std::vector<std::uint32_t> q;
  std::string scheme;
  std::string a;
  std::string parent = "japb";
  int parent_m = 0;
  std::uint64_t trials = 10000;
  std::uint64_t max_slots = 100'000'000;
  // exact
  std::string mode;
  std::vector<int> terms;
  int k = 1;
  int len = 0;
  std::string method = "full";
  // optimize / table / regimes
  int rounds = 0;
  std::size_t max_listed = 64;
  int n_min = 0;
  int n_max = 0;
  std::string alpha;
  std::string beta;
  std::string family = "both";
  // fit
  std::string input;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("ERGODIC_ALIGN_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t value = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw UsageError("ERGODIC_ALIGN_SEED is not an unsigned integer: '" + std::string(text) + "'");
    }
    return value;
  }
  return 1;
}

Deadline deadline_of(const Options& o) { return Deadline(o.budget_seconds); }

int single_n(const Options& o) {
  if (o.n.size() != 1) throw UsageError("--n must be given exactly once");
  if (o.n.front() < 1) throw UsageError("--n must be at least 1");
  return o.n.front();
}

std::vector<int> parse_parts(const std::string& text) {
  try {
    return Composition::parse(text).parts();
  } catch (const std::exception& e) {
    throw UsageError("bad --a '" + text + "': " + e.what());
  }
}

SchemeSpec scheme_spec(const Options& o, int users) {
  if (o.scheme.empty()) throw UsageError("--scheme is required");
  SchemeSpec spec;
  spec.kind = parse_scheme_kind(o.scheme);
  if (spec.kind == SchemeKind::jap || spec.kind == SchemeKind::japb) {
    if (o.a.empty()) throw UsageError("--a is required for " + o.scheme);
    spec.composition = parse_parts(o.a);
  } else if (spec.kind == SchemeKind::child) {
    if (o.parent_m < 1) throw UsageError("--parent-m is required for child schemes");
    spec.parent = parse_scheme_kind(o.parent);
    spec.parent_users = o.parent_m;
    if (!o.a.empty()) {
      spec.composition = parse_parts(o.a);
    } else if (spec.parent == SchemeKind::jap || spec.parent == SchemeKind::japb) {
      spec.composition = {o.parent_m};
    }
  } else if (!o.a.empty()) {
    throw UsageError("--a only applies to jap, japb and child schemes");
  }
  for (auto q : o.q) validate(spec, users, PrimeField(q));
  return spec;
}

void require_q(const Options& o) {
  if (o.q.empty()) throw UsageError("at least one --q is required");
}

// ---------------------------------------------------------------------------
// Subcommands

Report cmd_simulate(const Options& o) {
  const int n = single_n(o);
  require_q(o);
  const auto spec = scheme_spec(o, n);
  const auto seed = resolve_seed(o);
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  Report report{"simulate", {}, {}};
  for (auto q : o.q) {
    MonteCarloConfig config;
    config.scheme = spec;
    config.users = n;
    config.q = q;
    config.trials = o.trials;
    config.seed = seed;
    config.threads = o.threads;
    config.max_slots = o.max_slots;
    config.deadline = deadline_of(o);
    const auto s = monte_carlo(config);
    Row row;
    row.emplace_back("scheme", s.scheme);
    row.emplace_back("n", static_cast<long long>(s.users));
    row.emplace_back("q", static_cast<long long>(s.q));
    row.emplace_back("trials", s.trials);
    row.emplace_back("seed", s.seed);
    row.emplace_back("mean_delay", s.mean_delay);
    row.emplace_back("std_error", s.std_error);
    row.emplace_back("round_means", join_doubles(s.round_means));
    row.emplace_back("round_std_errors", join_doubles(s.round_std_errors));
    row.emplace_back("resamples", s.resamples);
    add_rational(row, "dof", s.dof);
    row.emplace_back("exponent", s.exponent);
    report.add(std::move(row));
  }
  return report;
}

std::string vector_text(const FieldVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v.raw(i));
  }
  return out + ")";
}

Report exact_lemma3(const Options& o) {
  require_q(o);
  if (o.terms.empty()) throw UsageError("at least one --L is required");
  Report report{"exact-lemma3", {}, {}};
  for (auto q : o.q) {
    for (int l : o.terms) {
      const auto signed_form = lemma3_failure(q, l);
      const auto convolution = lemma3_convolution(q, l);
      const auto unsigned_form = lemma3_failure_unsigned(q, l);
      Row row;
      row.emplace_back("q", static_cast<long long>(q));
      row.emplace_back("L", static_cast<long long>(l));
      add_rational(row, "probability", signed_form);
      row.emplace_back("convolution", to_string(convolution));
      add_rational(row, "unsigned_form", unsigned_form);
      row.emplace_back("signed_matches_convolution", signed_form == convolution);
      row.emplace_back("unsigned_matches_convolution", unsigned_form == convolution);
      report.add(std::move(row));
    }
  }
  return report;
}

Report exact_round(const Options& o) {
  const int n = single_n(o);
  require_q(o);
  if (o.a.empty()) throw UsageError("--a is required");
  const Composition a(parse_parts(o.a));
  if (a.users() != n) throw UsageError("--a " + a.to_string() + " does not sum to --n");
  const std::string scheme = o.scheme.empty() ? "japb" : o.scheme;
  if (scheme != "jap" && scheme != "japb") throw UsageError("exact round supports --scheme jap|japb");
  const bool beamformed = scheme == "japb";
  if (o.k < 1 || o.k > a.rounds()) throw UsageError("--k must lie in 1..K");
  const auto method =
      o.method == "full" ? EnumerationMethod::full_matrix : EnumerationMethod::per_receiver;
  const auto seed = resolve_seed(o);
  const auto deadline = deadline_of(o);

  Report report{"exact-round", {}, {}};
  for (auto q : o.q) {
    const PrimeField field(q);
    // The history is the run's own t_0..t_{k-1}, from a seeded stream.
    JapMachine machine(a, field, beamformed);
    RandomChannelStream stream(static_cast<std::size_t>(n), field, Rng(seed));
    machine.offer(stream.next());
    while (machine.run().rounds.size() < static_cast<std::size_t>(o.k - 1)) {
      if (stream.slots_drawn() > o.max_slots) throw SlotCapExceeded("history did not complete");
      deadline.check("exact round history");
      machine.offer(stream.next());
    }
    const auto& history = machine.run().slots;
    const auto p = exact_round_probability(a, o.k, history, beamformed, method, deadline);
    const auto per = exact_receiver_probabilities(a, o.k, history, beamformed, deadline);
    std::string per_text;
    for (std::size_t i = 0; i < per.size(); ++i) per_text += (i ? ";" : "") + to_string(per[i]);
    const auto exps = beamformed ? japb_exponent(a) : jap_exponent(a);
    Row row;
    row.emplace_back("n", static_cast<long long>(n));
    row.emplace_back("q", static_cast<long long>(q));
    row.emplace_back("scheme", scheme);
    row.emplace_back("composition", a.to_string());
    row.emplace_back("k", static_cast<long long>(o.k));
    row.emplace_back("method", o.method);
    row.emplace_back("seed", seed);
    add_rational(row, "probability", p);
    row.emplace_back("receiver_probabilities", per_text);
    row.emplace_back("predicted_exponent",
                     exps.per_round[static_cast<std::size_t>(o.k - 1)]);
    report.add(std::move(row));
  }
  return report;
}

Report exact_span(const Options& o) {
  require_q(o);
  if (o.k < 1 || o.len < o.k) throw UsageError("span needs 1 <= --k <= --len");
  const auto seed = resolve_seed(o);
  Report report{"exact-span", {}, {}};
  for (auto q : o.q) {
    const PrimeField field(q);
    Rng rng(seed);
    std::vector<FieldVector> basis;
    for (int attempt = 0; basis.size() < static_cast<std::size_t>(o.k); ++attempt) {
      if (attempt > 10000) throw std::invalid_argument("no independent nonzero-entry basis found");
      std::vector<Residue> entries(static_cast<std::size_t>(o.len));
      for (auto& e : entries) e = static_cast<Residue>(1 + rng.uniform_below(q - 1));
      basis.emplace_back(field, std::move(entries));
      if (rank(basis) < basis.size()) basis.pop_back();
    }
    const auto s = span_fullness(basis, deadline_of(o));
    std::string basis_text;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      basis_text += (i ? ";" : "") + vector_text(basis[i]);
    }
    Row row;
    row.emplace_back("q", static_cast<long long>(q));
    row.emplace_back("k", static_cast<long long>(o.k));
    row.emplace_back("len", static_cast<long long>(o.len));
    row.emplace_back("seed", seed);
    add_rational(row, "proportion", s.proportion);
    add_rational(row, "expansion", s.expansion);
    row.emplace_back("scaled_deficit", to_double((1 - s.proportion) * q));
    row.emplace_back("basis", basis_text);
    report.add(std::move(row));
  }
  return report;
}

Report cmd_exact(const Options& o) {
  if (o.mode == "lemma3") return exact_lemma3(o);
  if (o.mode == "round") return exact_round(o);
  return exact_span(o);
}

Report cmd_optimize(const Options& o) {
  const int n = single_n(o);
  if (o.rounds < 1 || o.rounds > n) throw UsageError("--rounds must lie in 1..n");
  const auto best = optimize(n, o.rounds, o.max_listed, deadline_of(o));
  std::string listed;
  for (std::size_t i = 0; i < best.argmins.size(); ++i) {
    listed += (i ? ";" : "") + best.argmins[i].to_string();
  }
  Row row;
  row.emplace_back("n", static_cast<long long>(n));
  row.emplace_back("K", static_cast<long long>(o.rounds));
  add_rational(row, "dof", scheme_dof(o.rounds));
  row.emplace_back("exponent", best.exponent);
  row.emplace_back("argmin_count", best.argmin_count.str());
  row.emplace_back("unique", best.unique());
  row.emplace_back("argmins", listed);
  row.emplace_back("truncated", best.truncated());
  if (o.rounds <= n - 2) {
    const auto b = bounds(n, o.rounds);
    add_rational(row, "lower_bound", b.lower);
    add_rational(row, "upper_bound", b.upper);
  } else {
    for (const char* name : {"lower_bound", "upper_bound"}) {
      row.emplace_back(name, std::monostate{});
      row.emplace_back(std::string(name) + "_float", std::monostate{});
    }
  }
  Report report{"optimize", {}, {}};
  report.add(std::move(row));
  return report;
}

Report cmd_table(const Options& o) {
  const int lo = o.n_min != 0 ? o.n_min : 3;
  const int hi = o.n_max != 0 ? o.n_max : 8;
  Report report{"table", {}, {}};
  for (const auto& c : best_scheme_table(lo, hi, deadline_of(o))) {
    Row row;
    row.emplace_back("n", static_cast<long long>(c.users));
    row.emplace_back("K", static_cast<long long>(c.rounds));
    add_rational(row, "dof", c.dof);
    row.emplace_back("exponent", c.exponent);
    row.emplace_back("argmin", c.argmin.to_string());
    row.emplace_back("unique", c.unique);
    row.emplace_back("tdma_equivalent", c.tdma_equivalent);
    row.emplace_back("cell", c.tdma_equivalent ? std::to_string(c.exponent) + " TDMA"
                                               : std::to_string(c.exponent) + " " +
                                                     c.argmin.to_string() + (c.unique ? "" : "*"));
    report.add(std::move(row));
  }
  return report;
}

Report cmd_figure(const Options& o) {
  std::vector<int> users = o.n;
  if (users.empty()) users = {3, 4, 5, 6, 7};
  Report report{"figure", {}, {}};
  const auto deadline = deadline_of(o);
  for (int n : users) {
    for (const auto& p : figure_points(n, deadline)) {
      Row row;
      row.emplace_back("n", static_cast<long long>(p.users));
      row.emplace_back("family", p.family);
      row.emplace_back("parent_users", static_cast<long long>(p.parent_users));
      row.emplace_back("rounds", static_cast<long long>(p.rounds));
      row.emplace_back("composition", p.composition);
      add_rational(row, "dof", p.dof);
      row.emplace_back("exponent", p.exponent);
      report.add(std::move(row));
    }
  }
  return report;
}

Report cmd_regimes(const Options& o) {
  if (o.alpha.empty() == o.beta.empty()) throw UsageError("give exactly one of --alpha or --beta");
  const auto params = o.alpha.empty() ? RegimeParams::beta(parse_rational(o.beta))
                                      : RegimeParams::alpha(parse_rational(o.alpha));
  const std::string regime = o.alpha.empty() ? "II" : "I";
  const int lo = o.n_min != 0 ? o.n_min : 3;
  const int hi = o.n_max != 0 ? o.n_max : 40;
  Report report{"regimes", {}, {}};
  auto emit = [&](const std::string& family, const std::vector<RegimeRow>& rows) {
    for (const auto& r : rows) {
      Row row;
      row.emplace_back("family", family);
      row.emplace_back("regime", regime);
      row.emplace_back("value", to_string(params.value));
      row.emplace_back("n", static_cast<long long>(r.users));
      row.emplace_back("parameter", static_cast<long long>(r.parameter));
      row.emplace_back("exact", r.exact);
      add_rational(row, "predicted_lower", r.predicted_lower);
      add_rational(row, "predicted_upper", r.predicted_upper);
      row.emplace_back("ratio", r.ratio);
      report.add(std::move(row));
    }
  };
  if (o.family != "child") emit("parent", regime_parent_sweep(params, lo, hi, deadline_of(o)));
  if (o.family != "parent") emit("child", regime_child_sweep(params, lo, hi));
  return report;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw UsageError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_number(const std::string& text, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError(std::string("bad ") + what + " value '" + text + "' in --input");
  }
  return v;
}

Report cmd_fit(const Options& o) {
  std::vector<std::pair<double, double>> sweep;
  std::string source;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw UsageError("cannot read --input '" + o.input + "'");
    const auto rows = read_csv(in);
    if (rows.empty()) throw UsageError("--input is empty");
    const auto& header = rows.front();
    const auto col = [&](const char* name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw UsageError(std::string("--input lacks a '") + name + "' column");
      return static_cast<std::size_t>(it - header.begin());
    };
    const auto qc = col("q");
    const auto dc = col("mean_delay");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() == 1 && rows[r][0].empty()) continue;
      if (rows[r].size() != header.size()) throw UsageError("ragged row in --input");
      sweep.emplace_back(parse_number(rows[r][qc], "q"), parse_number(rows[r][dc], "mean_delay"));
    }
    source = "input";
  } else {
    const auto report = cmd_simulate(o);
    for (const auto& row : report.rows) {
      sweep.emplace_back(static_cast<double>(std::get<long long>(row[2])), std::get<double>(row[5]));
    }
    source = std::get<std::string>(report.rows.front()[0]);
  }
  const auto fit = fit_exponent(sweep);
  Row row;
  row.emplace_back("source", source);
  row.emplace_back("points", static_cast<std::uint64_t>(sweep.size()));
  row.emplace_back("q_values", join_doubles(fit.q_values));
  row.emplace_back("mean_delays", join_doubles(fit.mean_delays));
  row.emplace_back("slope", fit.slope);
  row.emplace_back("intercept", fit.intercept);
  row.emplace_back("constant", std::exp(fit.intercept));
  row.emplace_back("slope_qm1", fit.slope_qm1);
  row.emplace_back("intercept_qm1", fit.intercept_qm1);
  Report report{"fit", {}, {}};
  report.add(std::move(row));
  return report;
}

// ---------------------------------------------------------------------------
// Parser

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out_path, "Write output to this path instead of stdout");
  cmd->add_option("--budget-seconds", o.budget_seconds, "Wall-clock budget, 0 = none")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = available parallelism");
  cmd->add_option("--seed", o.seed, "Master seed (falls back to ERGODIC_ALIGN_SEED, then 1)");
}

void add_scheme_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--scheme", o.scheme, "ngjv | tdma | jap | japb | child")
      ->check(CLI::IsMember({"ngjv", "tdma", "jap", "japb", "child"}));
  cmd->add_option("--a", o.a, "Composition, e.g. 1,3");
  cmd->add_option("--parent", o.parent, "Parent scheme of a child")
      ->check(CLI::IsMember({"ngjv", "tdma", "jap", "japb"}));
  cmd->add_option("--parent-m", o.parent_m, "Users per subnetwork of a child scheme");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--max-slots", o.max_slots, "Per-run slot cap, 0 = unbounded");
}

std::string one_line(std::string text) {
  for (auto& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Ergodic interference alignment over finite-field channels", "ergodic-align"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo delay of a scheme");
  simulate->add_option("--n", o.n, "Users")->required();
  simulate->add_option("--q", o.q, "Field size (repeatable)")->required();
  add_scheme_options(simulate, o);
  simulate->get_option("--scheme")->required();
  add_common(simulate, o);

  auto* exact = app.add_subcommand("exact", "Exact enumeration oracles");
  exact->add_option("mode", o.mode, "lemma3 | round | span")
      ->required()
      ->check(CLI::IsMember({"lemma3", "round", "span"}));
  exact->add_option("--n", o.n, "Users");
  exact->add_option("--q", o.q, "Field size (repeatable)");
  exact->add_option("--L", o.terms, "Number of summands (repeatable)");
  exact->add_option("--a", o.a, "Composition");
  exact->add_option("--scheme", o.scheme, "jap | japb (round)");
  exact->add_option("--k", o.k, "Round index (round) or span dimension (span)");
  exact->add_option("--len", o.len, "Vector length (span)");
  exact->add_option("--method", o.method, "Enumeration method (round)")
      ->check(CLI::IsMember({"full", "per-receiver"}));
  exact->add_option("--max-slots", o.max_slots, "Slot cap while building the history");
  add_common(exact, o);

  auto* opt = app.add_subcommand("optimize", "Best JAP-B composition for (n, K)");
  opt->add_option("--n", o.n, "Users")->required();
  opt->add_option("-K,--rounds", o.rounds, "Rounds K")->required();
  opt->add_option("--max-listed", o.max_listed, "Argmins to list");
  add_common(opt, o);

  auto* table = app.add_subcommand("table", "Best JAP-B schemes per (n, K)");
  table->add_option("--n-min", o.n_min, "Smallest n (default 3)");
  table->add_option("--n-max", o.n_max, "Largest n (default 8)");
  add_common(table, o);

  auto* figure = app.add_subcommand("figure", "Delay exponent against DOF");
  figure->add_option("--n", o.n, "Users (repeatable, default 3..7)");
  add_common(figure, o);

  auto* regimes = app.add_subcommand("regimes", "Many-user asymptotics");
  regimes->add_option("--alpha", o.alpha, "Regime I DOF in (0, 1/2]");
  regimes->add_option("--beta", o.beta, "Regime II sum-rate multiple >= 1");
  regimes->add_option("--n-min", o.n_min, "Smallest n (default 3)");
  regimes->add_option("--n-max", o.n_max, "Largest n (default 40)");
  regimes->add_option("--family", o.family, "parent | child | both")
      ->check(CLI::IsMember({"parent", "child", "both"}));
  add_common(regimes, o);

  auto* fit = app.add_subcommand("fit", "Log-log delay exponent fit");
  fit->add_option("--input", o.input, "CSV with q and mean_delay columns");
  fit->add_option("--n", o.n, "Users (when simulating)");
  fit->add_option("--q", o.q, "Field size (repeatable, when simulating)");
  add_scheme_options(fit, o);
  add_common(fit, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    Report report;
    if (*simulate) report = cmd_simulate(o);
    else if (*exact) report = cmd_exact(o);
    else if (*opt) report = cmd_optimize(o);
    else if (*table) report = cmd_table(o);
    else if (*figure) report = cmd_figure(o);
    else if (*regimes) report = cmd_regimes(o);
    else report = cmd_fit(o);

    const auto text = o.format == "json" ? render_json(report) : render_csv(report);
    if (o.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(o.out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot open --out '" + o.out_path + "'");
      file << text;
      if (!file.flush()) throw std::runtime_error("failed writing --out '" + o.out_path + "'");
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace ergodic_align
