#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cvxrich::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) {
  return (fs::path(CVXRICH_DATA_DIR) / name).string();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cvxrich_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("estimate prints the empirical interval") {
  const auto r = run({"estimate", data("butterfly.freq"), "--method", "empirical"});
  CHECK(r.code == 0);
  CHECK(r.out.find("empirical 782 (729, 835)") != std::string::npos);
}

TEST_CASE("estimate with the convex method and plug-in interval") {
  const auto r = run({"estimate", data("bird.freq"), "--method", "convex", "--ci",
                      "plugin", "--seed", "7", "--output", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("estimates").at(0).at("n_hat") == 87);
  const auto& ci = j.at("intervals").at(0);
  CHECK(ci.at("method") == "plugin");
  CHECK(std::abs(ci.at("lower_int").get<int>() - 71) <= 3);
  CHECK(std::abs(ci.at("upper_int").get<int>() - 96) <= 3);

  const auto again = run({"estimate", data("bird.freq"), "--method", "convex", "--ci",
                          "plugin", "--seed", "7", "--output", "json"});
  CHECK(again.out == r.out);
}

TEST_CASE("estimate csv output") {
  const auto r = run({"estimate", data("tomato.freq"), "--method", "empirical",
                      "--output", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("method,level,n_hat,lower,upper,n_sims,seed\n", 0) == 0);
}

TEST_CASE("input errors exit with code 1") {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  const auto empty = (dir / "empty.freq").string();
  std::ofstream(empty) << "# format: freq\n";
  const auto r = run({"estimate", empty});
  CHECK(r.code == 1);
  CHECK(r.err.find("no observed species") != std::string::npos);

  CHECK(run({"estimate", (dir / "missing.freq").string()}).code == 1);
  CHECK(run({"estimate", data("bird.freq"), "--method", "magic"}).code == 1);
  CHECK(run({"estimate", data("bird.freq"), "--alpha", "3"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("project writes the fitted pmf") {
  const auto dir = scratch("project");
  const auto r = run({"project", data("bird.freq"), "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto tsv = slurp(dir / "projection.tsv");
  CHECK(tsv.rfind("j\tf\tphat\n1\t", 0) == 0);
  const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK(fit.at("k_hat") == 5);

  // A huge knot tolerance hides every knot, which changes the reported structure.
  const auto loose = run({"project", data("bird.freq"), "--knot-tol", "1", "--output", "json"});
  REQUIRE(loose.code == 0);
  CHECK(nlohmann::json::parse(loose.out).at("knots").empty());
  fs::remove_all(dir);
}

TEST_CASE("simulate is reproducible from the seed") {
  const std::vector<std::string> args = {"simulate", "--nu", "1.5", "--n", "300",
                                         "--seed", "9"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("format: freq") != std::string::npos);
}

TEST_CASE("study smoke run") {
  const auto dir = scratch("study");
  fs::create_directories(dir);
  const auto config = (dir / "study.cfg").string();
  std::ofstream(config) << "nu = 1.5\nn = 100\nn_reps = 5\nn_sims = 20\nseed = 1\n";
  const auto r = run({"study", config});
  REQUIRE(r.code == 0);
  int lines = 0;
  for (const char ch : r.out) lines += ch == '\n';
  CHECK(lines == 1 + 2 + 2);
  CHECK(r.err.find("cell 1/1") != std::string::npos);
  CHECK(run({"study", config}).out == r.out);
  fs::remove_all(dir);
}
