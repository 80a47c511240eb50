#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sgc/cli/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sgcurve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = sgc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(SGC_TEST_DATA) + "/" + name; }

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "sgcurve-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<double> zeros(const nlohmann::json& list) {
  std::vector<double> out;
  for (const auto& z : list)
    for (int k = 0; k < z["multiplicity"].get<int>(); ++k) out.push_back(z["s"].get<double>());
  return out;
}

}  // namespace

TEST_CASE("analyze reports hypotheses and indices") {
  auto r = run({"analyze", "--s", "4"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["corank"] == 1);
  CHECK(j["indF"] == 1);
  CHECK(j["indExt"] == 0);
  r = run({"analyze", "--s", "2"});
  j = nlohmann::json::parse(r.out);
  CHECK(j["indF"] == 0);
  CHECK(j["indExt"] == 0);
}

TEST_CASE("exit codes") {
  auto missing = run({"analyze", "--frame", "/no/such/frame.json"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("/no/such/frame.json") != std::string::npos);

  auto mart = run({"analyze", "--frame", "martinet", "--s", "1"});
  CHECK(mart.code == 2);
  CHECK(mart.err.find("strictness") != std::string::npos);

  CHECK(run({"analyze", "--frame", "heisenberg"}).code == 2);
  CHECK(run({"analyze", "--s", "-1"}).code == 1);
  CHECK(run({"analyze", "--grid", "0"}).code == 1);
  CHECK(run({"analyze", "--bogus"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"conjugate", "--method", "magic"}).code == 1);
  CHECK(run({"analyze", "--integrator", "euler"}).code == 1);
}

TEST_CASE("conjugate on an empty range") {
  auto r = run({"conjugate", "--s-min", "5", "--s-max", "5"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  for (const char* m : {"hessian", "jacobi", "engel"})
    for (const char* v : {"F", "Ext"}) CHECK(j["methods"][m][v].empty());
}

TEST_CASE("engel method needs a four-dimensional frame") {
  auto r = run({"conjugate", "--frame", data("goursat5.json"), "--method", "engel", "--s-max", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("dimension") != std::string::npos);
}

TEST_CASE("three methods agree on the first conjugate times") {
  auto r = run({"conjugate", "--s-max", "10", "--method", "all", "--step", "0.05"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  const double pi = std::numbers::pi;
  std::vector<double> f{pi, 2 * pi, 3 * pi}, e{2 * pi, 8.986818916};
  for (const char* m : {"hessian", "jacobi", "engel"}) {
    CAPTURE(m);
    auto zf = zeros(j["methods"][m]["F"]), ze = zeros(j["methods"][m]["Ext"]);
    REQUIRE(zf.size() == f.size());
    REQUIRE(ze.size() == e.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(zf[i] - f[i]) < 2e-4);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(ze[i] - e[i]) < 2e-4);
  }
  for (const auto& row : j["agreement"]) {
    REQUIRE_FALSE(row["max_distance"].is_null());
    CHECK(row["max_distance"].get<double>() < 2e-4);
  }
}

TEST_CASE("profile reproduces the index-pair sequence") {
  auto csv = scratch("profile.csv"), gp = scratch("profile.gp");
  auto r = run({"profile", "--s-max", std::to_string(6 * std::numbers::pi), "--step", "0.05", "--out", csv.string(),
                "--emit-gnuplot", gp.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,aF,aExt,indF,nullF,indExt,nullExt,minAbsEig");
  std::vector<std::pair<int, int>> seq;
  int rows = 0;
  double last = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 8);
    last = std::stod(cells[0]);
    std::pair<int, int> p{std::stoi(cells[3]), std::stoi(cells[5])};
    if (seq.empty() || seq.back() != p) seq.push_back(p);
  }
  CHECK(rows == 377);
  CHECK(last > 6 * std::numbers::pi);
  const std::vector<std::pair<int, int>> expected{{0, 0}, {1, 0}, {2, 1}, {2, 2}, {3, 2},
                                                  {4, 3}, {4, 4}, {5, 4}, {6, 5}};
  CHECK(seq == expected);
  std::ifstream g(gp);
  std::stringstream script;
  script << g.rdbuf();
  CHECK(script.str().find("plot '" + csv.string() + "'") != std::string::npos);
}

TEST_CASE("profile edge cases") {
  auto r = run({"profile", "--s-max", "1", "--step", "5"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);
  CHECK(run({"profile", "--s-max", "1", "--step", "0.5", "--out", "/no/such/dir/p.csv"}).code == 1);
}

TEST_CASE("verify-example subsets and tolerance") {
  auto r = run({"verify-example", "--criteria", "5,6,7"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["criteria"].size() == 3);
  CHECK(j["passed"].get<bool>());
  CHECK(r.err.find("PASS 5") != std::string::npos);

  auto strict = run({"verify-example", "--criteria", "1", "--tol-verify", "1e-12"});
  CHECK(strict.code == 3);
  CHECK(nlohmann::json::parse(strict.out)["failed"] == nlohmann::json::array({1}));
  CHECK(run({"verify-example", "--criteria", "12"}).code == 1);
}

TEST_CASE("rho-check") {
  auto r = run({"rho-check", "--samples", "20"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["samples"] == 20);
  CHECK(j["passed"].get<bool>());
}

TEST_CASE("config file mirrors flags") {
  auto r = run({"analyze", "--config", data("config_s2.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["s"] == 2.0);
  CHECK(j["indF"] == 0);
  // flags override file values
  r = run({"analyze", "--config", data("config_s2.json"), "--s", "4"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["indF"] == 1);
  CHECK(run({"analyze", "--config", data("config_bad.json")}).code == 1);
  CHECK(run({"analyze", "--config", "/no/such/config.json"}).code == 1);
}

TEST_CASE("reports are deterministic") {
  auto a = run({"analyze", "--s", "3"}), b = run({"analyze", "--s", "3"});
  CHECK(a.out == b.out);
}
