#include "cli.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace consortium::tools;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "consortium_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

} // namespace

TEST_CASE("equilibria report") {
  const auto dir = scratch("eq");
  const Run r = run({"--out", dir.string(), "equilibria", "--alpha", "0.5", "--d", "0.5", "--s-in", "1.0"});
  REQUIRE(r.code == kExitOk);
  const json j = load(dir / "equilibria.json");
  CHECK(j["x11"]["state"]["c"].get<double>() == doctest::Approx(0.90770196).epsilon(1e-7));
  CHECK(j["regime"] == "COEXISTENCE_GAS");
  const json m = load(dir / "run_manifest.json");
  CHECK(m["command"] == "equilibria");
  CHECK(m["outputs"] == json::array({"equilibria.json"}));
}

TEST_CASE("total washout at large dilution") {
  const auto dir = scratch("washout");
  REQUIRE(run({"--out", dir.string(), "classify", "--d", "10"}).code == kExitOk);
  CHECK(load(dir / "classify.json")["regime"] == "TOTAL_WASHOUT_GAS");
}

TEST_CASE("validation errors name the flag") {
  const Run a = run({"--out", scratch("bad").string(), "equilibria", "--alpha", "1.0"});
  CHECK(a.code == kExitValidation);
  CHECK(a.err.find("--alpha") != std::string::npos);
  CHECK(run({"equilibria", "--alpha", "abc"}).code == kExitValidation);
  CHECK(run({"nonsense"}).code == kExitValidation);
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"--format", "xml", "params"}).code == kExitValidation);
  const Run b = run({"--out", scratch("bad2").string(), "optimize", "ptheta"});
  CHECK(b.code == kExitValidation);
  CHECK(b.err.find("--theta") != std::string::npos);
  CHECK(run({"--out", scratch("bad3").string(), "pareto", "--theta-profile"}).code == kExitValidation);
}

TEST_CASE("infeasible request") {
  const Run r = run({"--out", scratch("inf").string(), "optimize", "yield-alpha", "--d", "5"});
  CHECK(r.code == kExitInfeasible);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("parameter file and environment") {
  const auto dir = scratch("params");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "p.txt");
    f << "beta = 30\n";
  }
  REQUIRE(run({"--out", (dir / "a").string(), "--params", (dir / "p.txt").string(), "params"}).code == kExitOk);
  CHECK(load(dir / "a" / "params.json")["beta"] == 30.0);
  CHECK(load(dir / "a" / "run_manifest.json")["params"]["beta"] == 30.0);
  {
    std::ofstream f(dir / "bad.txt");
    f << "bogus = 1\n";
  }
  CHECK(run({"--out", (dir / "b").string(), "--params", (dir / "bad.txt").string(), "params"}).code ==
        kExitValidation);
  CHECK(run({"--params", (dir / "missing.txt").string(), "params"}).code == kExitIo);
}

TEST_CASE("optimize commands") {
  const auto dir = scratch("opt");
  REQUIRE(run({"--out", (dir / "pout").string(), "optimize", "pout", "--s-in", "1.0"}).code == kExitOk);
  const json pout = load(dir / "pout" / "optimize.json");
  CHECK(pout["result"]["oracle_gap"].get<double>() < 1e-4);
  CHECK_FALSE(pout["result"]["boundary_supremum"].get<bool>());

  REQUIRE(run({"--out", (dir / "pt").string(), "optimize", "ptheta", "--theta", "1.0", "--s-in", "1.0", "--grid-n",
               "0"})
              .code == kExitOk);
  const json pt = load(dir / "pt" / "optimize.json");
  CHECK(std::abs(pt["result"]["u_star"]["alpha"].get<double>() - pout["result"]["u_star"]["alpha"].get<double>()) <
        1e-5);
  CHECK(std::abs(pt["result"]["u_star"]["d"].get<double>() - pout["result"]["u_star"]["d"].get<double>()) < 1e-5);

  REQUIRE(run({"--out", (dir / "ya").string(), "optimize", "yield-alpha", "--d", "0.5", "--s-in", "1.0"}).code ==
          kExitOk);
  const json ya = load(dir / "ya" / "optimize.json")["result"];
  CHECK(ya["alpha_star"].get<double>() > ya["alpha_lo"].get<double>());
  CHECK(ya["alpha_star"].get<double>() < ya["alpha_hi"].get<double>());

  REQUIRE(run({"--out", (dir / "contour").string(), "optimize", "pout", "--grid-n", "0", "--contour-n", "20"}).code ==
          kExitOk);
  CHECK(fs::exists(dir / "contour" / "contour.csv"));
}

TEST_CASE("pareto command") {
  const auto dir = scratch("pareto");
  REQUIRE(run({"--out", dir.string(), "pareto", "--s-in", "1", "--theta-n", "101", "--grid-n", "400", "--z", "2",
               "--theta-profile", "--sin-list", "0.5,1,2", "--plot"})
              .code == kExitOk);
  const json report = load(dir / "dominance.json");
  CHECK(report["violation_count"] == 0);
  CHECK(report["reachable"]["nesting_violations"] == 0);
  CHECK(report["failed_solves"].empty());

  std::ifstream profile(dir / "profile.csv");
  std::string line;
  std::getline(profile, line);
  std::set<std::string> feeds;
  while (std::getline(profile, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 4; ++i) std::getline(ss, cell, ',');
    feeds.insert(cell);
  }
  CHECK(feeds == std::set<std::string>{"0", "2"});
  for (const char* svg : {"front.svg", "reachable.svg", "profile.svg"}) CHECK(fs::exists(dir / svg));
}

TEST_CASE("hessian map and simulate") {
  const auto dir = scratch("hs");
  REQUIRE(run({"--out", (dir / "h").string(), "hessian-map", "--s-in", "1", "--grid-n", "100"}).code == kExitOk);
  const json counts = load(dir / "h" / "hessian_map_summary.json")["counts"];
  CHECK(counts["NON_DEF"].get<int>() > 0);
  CHECK(counts["POS_DEF"].get<int>() + counts["NEG_DEF"].get<int>() > 0);

  REQUIRE(run({"--out", (dir / "s").string(), "simulate", "--alpha", "0.5", "--d", "0.5", "--t-end", "500"}).code ==
          kExitOk);
  const json sim = load(dir / "s" / "simulate.json");
  CHECK(sim["terminal_event"] == "CONVERGED");
  CHECK(sim["nearest_equilibrium"] == "x11");
  CHECK(run({"--out", (dir / "bad").string(), "simulate", "--x0", "1,2,3"}).code == kExitValidation);
}

TEST_CASE("reruns are byte-identical") {
  const std::vector<std::vector<std::string>> commands{
      {"equilibria", "--alpha", "0.3", "--d", "0.2"},
      {"simulate", "--t-end", "50", "--seed", "9"},
      {"--format", "json", "optimize", "pout", "--s-in", "2", "--grid-n", "100", "--contour-n", "10"},
      {"pareto", "--theta-n", "21", "--grid-n", "100", "--sin-list", "0.5,1", "--reach-n", "50", "--threads", "2"},
      {"hessian-map", "--grid-n", "30"},
      {"reachable", "--grid-n", "40"},
  };
  int k = 0;
  for (const auto& cmd : commands) {
    CAPTURE(k);
    const auto a = scratch("rerun_a" + std::to_string(k)), b = scratch("rerun_b" + std::to_string(k));
    std::vector<std::string> args{"--out", a.string()};
    args.insert(args.end(), cmd.begin(), cmd.end());
    REQUIRE(run(args).code == kExitOk);
    REQUIRE(run({"--out", b.string(), "replay", (a / "run_manifest.json").string()}).code == kExitOk);
    CHECK(snapshot(a) == snapshot(b));
    ++k;
  }
}

TEST_CASE("thread count does not change outputs") {
  const auto a = scratch("threads1"), b = scratch("threads4");
  REQUIRE(run({"--out", a.string(), "hessian-map", "--grid-n", "50"}).code == kExitOk);
  REQUIRE(run({"--out", b.string(), "--threads", "4", "hessian-map", "--grid-n", "50"}).code == kExitOk);
  CHECK(slurp(a / "hessian_map.csv") == slurp(b / "hessian_map.csv"));
}
