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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ergodic_align/cli.hpp"

using ergodic_align::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("simulate") {
  const auto r = run({"simulate", "--scheme", "tdma", "--n", "5", "--q", "3", "--trials", "10"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] ==
        "scheme,n,q,trials,seed,mean_delay,std_error,round_means,round_std_errors,resamples,dof,"
        "dof_float,exponent");
  CHECK(l[1].rfind("tdma,5,3,10,1,5,0,", 0) == 0);

  const auto j = run({"simulate", "--scheme", "japb", "--a", "1,3", "--n", "4", "--q", "3", "--q",
                      "5", "--trials", "200", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["command"] == "simulate");
  CHECK(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["scheme"] == "japb[1,3]");
  CHECK(doc["rows"][1]["q"] == 5);
  CHECK(doc["rows"][0]["exponent"] == 2);
}

TEST_CASE("identical configuration gives identical bytes") {
  const std::vector<std::string> args{"simulate", "--scheme", "jap", "--a", "1,2", "--n", "3",
                                      "--q", "3", "--trials", "500", "--seed", "9"};
  auto with_threads = [&](const char* t) {
    auto a = args;
    a.insert(a.end(), {"--threads", t});
    return run(a).out;
  };
  const auto first = with_threads("1");
  CHECK(first == with_threads("1"));
  CHECK(first == with_threads("4"));
}

TEST_CASE("seed from the environment") {
  const std::vector<std::string> args{"simulate", "--scheme", "ngjv", "--n", "1", "--q", "5",
                                      "--trials", "100"};
  ::setenv("ERGODIC_ALIGN_SEED", "77", 1);
  const auto env = run(args);
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "77"});
  const auto flag = run(explicit_args);
  ::setenv("ERGODIC_ALIGN_SEED", "not-a-number", 1);
  const auto bad = run(args);
  ::unsetenv("ERGODIC_ALIGN_SEED");
  CHECK(env.out == flag.out);
  CHECK(env.out.find(",77,") != std::string::npos);
  CHECK(bad.code != 0);
}

TEST_CASE("exact") {
  const auto l = run({"exact", "lemma3", "--q", "3", "--L", "2"});
  REQUIRE(l.code == 0);
  CHECK(lines(l.out)[1].rfind("3,2,1/2,0.5,1/2,", 0) == 0);

  const auto s = run({"exact", "span", "--k", "1", "--len", "3", "--q", "5"});
  REQUIRE(s.code == 0);
  CHECK(lines(s.out)[1].rfind("5,1,3,1,4/5,0.8,", 0) == 0);

  const auto r = run({"exact", "round", "--n", "3", "--a", "1,2", "--k", "1", "--q", "3",
                      "--scheme", "jap", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["rows"][0]["probability"] == "1/4");
  CHECK(doc["rows"][0]["predicted_exponent"] == 1);

  const auto r2 = run({"exact", "round", "--n", "3", "--a", "1,2", "--k", "2", "--q", "3"});
  CHECK(r2.code == 0);
}

TEST_CASE("optimize, table, figure, regimes") {
  const auto o = run({"optimize", "--n", "6", "-K", "3", "--format", "json"});
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(o.out);
  CHECK(doc["rows"][0]["exponent"] == 4);
  CHECK(doc["rows"][0]["unique"] == false);
  CHECK(doc["rows"][0]["lower_bound"] == "1");
  CHECK(doc["rows"][0]["upper_bound"] == "8");

  const auto t = run({"table"});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("7,2,1/3,0.3333333333333333,12,\"[3,4]\",true,false,\"12 [3,4]\"") !=
        std::string::npos);
  CHECK(t.out.find("\"6 [1,2,2,3]*\"") != std::string::npos);
  CHECK(t.out.find("3,2,1/3,0.3333333333333333,0,\"[1,2]\",true,true,0 TDMA") != std::string::npos);

  const auto f = run({"figure", "--n", "4"});
  REQUIRE(f.code == 0);
  CHECK(f.out.find("4,ngjv,4,1,,1/2,0.5,16") != std::string::npos);
  CHECK(f.out.find("4,japb,4,1,[4],1/2,0.5,6") != std::string::npos);

  const auto g = run({"regimes", "--beta", "2", "--n-min", "4", "--n-max", "9", "--family", "child"});
  REQUIRE(g.code == 0);
  CHECK(lines(g.out).size() == 7);
}

TEST_CASE("fit from a simulate file") {
  const auto dir = std::filesystem::temp_directory_path() / "ergodic_align_cli_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "sweep.csv").string();
  const auto sim = run({"simulate", "--scheme", "tdma", "--n", "3", "--q", "3", "--q", "5", "--q",
                        "7", "--trials", "5", "--out", csv});
  REQUIRE(sim.code == 0);
  CHECK(sim.out.empty());
  const auto fit = run({"fit", "--input", csv, "--format", "json"});
  REQUIRE(fit.code == 0);
  const auto doc = nlohmann::json::parse(fit.out);
  CHECK(doc["rows"][0]["slope"].get<double>() == doctest::Approx(0.0));
  CHECK(doc["rows"][0]["points"] == 3);

  const auto direct = run({"fit", "--scheme", "ngjv", "--n", "1", "--q", "3", "--q", "5", "--q",
                           "7", "--trials", "2000"});
  CHECK(direct.code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid input fails with one line") {
  const std::vector<std::vector<std::string>> cases{
      {},
      {"simulate", "--scheme", "japb", "--n", "4", "--q", "3"},
      {"simulate", "--scheme", "japb", "--a", "1,2", "--n", "4", "--q", "3"},
      {"simulate", "--scheme", "ngjv", "--n", "2", "--q", "4"},
      {"simulate", "--scheme", "kwg", "--n", "2", "--q", "3"},
      {"simulate", "--scheme", "tdma", "--n", "2", "--q", "3", "--trials", "0"},
      {"exact", "lemma3", "--q", "3"},
      {"exact", "round", "--n", "4", "--a", "4", "--q", "11", "--method", "full"},
      {"exact", "span", "--k", "3", "--len", "2", "--q", "5"},
      {"optimize", "--n", "4", "-K", "9"},
      {"regimes", "--alpha", "1/3", "--beta", "2"},
      {"regimes", "--alpha", "0.9"},
      {"table", "--format", "xml"},
      {"fit", "--input", "/nonexistent/sweep.csv"},
      {"optimize", "--n", "400", "-K", "200", "--budget-seconds", "0.000000001"},
  };
  for (const auto& args : cases) {
    const auto r = run(args);
    INFO(r.err);
    CHECK(r.code != 0);
    CHECK(r.out.empty());
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(lines(r.err).size() == 1);
  }
}

TEST_CASE("help succeeds") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
}
