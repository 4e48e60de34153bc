// Black-box tests of the command-line tool: exit codes, CSV shapes,
// manifests, config precedence.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using json = nlohmann::json;

namespace {

const std::string kDir = "cli_tmp";

int run(const std::string& args) {
  const int rc =
      std::system((std::string(WDIFFUSE_BIN) + " " + args + " >/dev/null 2>&1")
                      .c_str());
  return WEXITSTATUS(rc);
}

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::vector<std::string> out;
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return json::parse(in);
}

}  // namespace

TEST_CASE("density table: header, rows, symmetry, trapezoid mass") {
  (void)std::system(("mkdir -p " + kDir).c_str());
  REQUIRE(run("density-table --beta 0.5 --k 1 --n 101 --out " + kDir +
              "/t1.csv") == 0);
  const auto ls = lines(kDir + "/t1.csv");
  REQUIRE(ls.size() == 102);
  CHECK(ls[0] == "x,density,error_estimate");
  std::vector<double> xs, vs;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream ss(ls[i]);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    xs.push_back(std::stod(a));
    vs.push_back(std::stod(b));
  }
  double trapz = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    CHECK(std::fabs(vs[i] - vs[vs.size() - 1 - i]) <= 1e-8);
    trapz += vs[i] * (1.0 / 102.0);
  }
  CHECK(std::fabs(trapz - 1.0) <= 1e-3);

  // k=2 coarse grid: only ordered pairs are emitted.
  REQUIRE(run("density-table --beta 0.5 --k 2 --n 19 --out " + kDir +
              "/t2.csv") == 0);
  const auto l2 = lines(kDir + "/t2.csv");
  CHECK(l2[0] == "x1,x2,density,error_estimate");
  CHECK(l2.size() == 1 + 19 * 18 / 2);
}

TEST_CASE("sample targets and manifests") {
  REQUIRE(run("sample --target mk --beta 0.5 --k 2 --n 500 --seed 1 --out " +
              kDir + "/mk.csv") == 0);
  const auto ls = lines(kDir + "/mk.csv");
  REQUIRE(ls.size() == 501);
  CHECK(ls[0] == "x1,x2");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream ss(ls[i]);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    REQUIRE(std::stod(a) < std::stod(b));
  }
  const auto m = load_json(kDir + "/mk.csv.manifest.json");
  CHECK(m["command"] == "sample");
  CHECK(m["config"]["seed"] == 1);

  REQUIRE(run("sample --target random_mean --beta 0.5 --n 2000 --seed 2 "
              "--out " + kDir + "/rm.csv") == 0);
  const auto mm = load_json(kDir + "/rm.csv.manifest.json");
  CHECK(mm["report"]["ks_vs_theta_cdf"]["pass_at_1pct"] == true);

  REQUIRE(run("sample --target dirichlet_grid --beta 0.5 --k 3 --n 10 "
              "--seed 3 --out " + kDir + "/dg.csv") == 0);
  CHECK(lines(kDir + "/dg.csv")[0] == "y0,y1,y2,y3");
}

TEST_CASE("simulate output shape and manifest") {
  // Exit 3 (all trajectories degenerate) still writes the CSV and manifest;
  // at this beta the boundary-attracting drift makes that outcome common.
  const int rc =
      run("simulate --k 2 --beta 0.5 --drift explicit --dt 1e-4 "
          "--horizon 0.01 --n 3 --seed 4 --record-stride 10 --out " +
          kDir + "/tr.csv");
  REQUIRE((rc == 0 || rc == 3));
  const auto ls = lines(kDir + "/tr.csv");
  CHECK(ls[0] == "traj,t,x1,x2");
  CHECK(ls.size() == 1 + 3 * 11);  // 3 trajectories, t=0 + 10 records each
  const auto m = load_json(kDir + "/tr.csv.manifest.json");
  CHECK(m["report"]["trajectories"].size() == 3);
}

TEST_CASE("exit codes: usage, parameter, numerical domain") {
  CHECK(run("") == 2);                        // missing subcommand
  CHECK(run("frobnicate") == 2);              // unknown subcommand
  CHECK(run("sample --target nonsense --out " + kDir + "/x.csv") == 2);
  CHECK(run("density-table --beta 5.0 --k 1 --n 3 --out " + kDir +
            "/x.csv") == 2);                  // beta/k outside (0,1)
  CHECK(run("simulate --k 9 --drift monotone --horizon 0.001 --n 1 --out " +
            kDir + "/x.csv") == 2);           // monotone drift needs k <= 8
}

TEST_CASE("config file supplies defaults, flags win") {
  {
    std::ofstream cfg(kDir + "/cfg.json");
    cfg << R"({"beta":0.4,"k":2,"n":50,"seed":11,"target":"mk"})";
  }
  REQUIRE(run("sample --config " + kDir + "/cfg.json --out " + kDir +
              "/c1.csv") == 0);
  const auto m1 = load_json(kDir + "/c1.csv.manifest.json");
  CHECK(m1["config"]["beta"] == 0.4);
  CHECK(m1["config"]["n"] == 50);
  REQUIRE(run("sample --config " + kDir + "/cfg.json --n 7 --out " + kDir +
              "/c2.csv") == 0);
  const auto m2 = load_json(kDir + "/c2.csv.manifest.json");
  CHECK(m2["config"]["n"] == 7);
  CHECK(lines(kDir + "/c2.csv").size() == 8);
}

TEST_CASE("verify report structure includes hierarchy_k1") {
  // A trimmed verify run is too slow here; reuse a cached fast-level report
  // if the caller provides one, else run it once.
  const std::string rep = kDir + "/verify.json";
  const int rc = run("verify --level fast --seed 5 --out " + rep);
  CHECK((rc == 0 || rc == 1));  // stationarity check may fail by design
  const auto r = load_json(rep);
  bool has_hierarchy = false;
  for (const auto& c : r["checks"]) {
    if (c["name"] == "hierarchy_k1") {
      has_hierarchy = true;
      CHECK(c.contains("relative_error"));
      CHECK(c["status"] == "pass");
    }
    REQUIRE((c["status"] == "pass" || c["status"] == "fail" ||
             c["status"] == "skip"));
  }
  CHECK(has_hierarchy);
}

TEST_CASE("convergence emits labeled statistics") {
  REQUIRE(run("convergence --beta 0.5 --seed 6 --n 40 --out " + kDir +
              "/conv.csv") == 0);
  const auto ls = lines(kDir + "/conv.csv");
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "k,drift,statistic,stderr");
  CHECK(ls[1].rfind("2,explicit,", 0) == 0);
  CHECK(ls[3].rfind("8,explicit,", 0) == 0);
  const auto m = load_json(kDir + "/conv.csv.manifest.json");
  CHECK(m["report"].contains("cauchy_like"));
}
