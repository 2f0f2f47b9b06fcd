#include <catch2/catch_amalgamated.hpp>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rpnshoot/cli.hpp"

using namespace rpnshoot;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("rpnshoot_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SECTION("defaults are deterministic") {
    RunConfig cfg = parse_config(json::object());
    CHECK(cfg.n == 4);
    CHECK(cfg.scan.lambda_min == 1e-3);
    CHECK(cfg.scan.lambda_max == 1e3);
    CHECK(cfg.scan.points == 41);
    CHECK(cfg.scan.log_spaced);
    CHECK(cfg.seed == 0);
    CHECK(cfg.profile().eval(0.5) == 8.0);  // constant n(n-2)
    RunConfig cfg6 = parse_config(json{{"n", 6}});
    CHECK(cfg6.profile().eval(0.0) == 24.0);
  }

  SECTION("full document") {
    json j = {
        {"n", 5},
        {"curvature",
         {{"family", "power"}, {"K0", 15.0}, {"K_rho", 2.0}, {"rho", 3.0}}},
        {"solver", {{"rel_tol", 1e-9}, {"max_steps", 50000}}},
        {"scan",
         {{"lambda_min", 0.1}, {"lambda_max", 10.0}, {"points", 5},
          {"log_spaced", false}}},
        {"output_dir", "/tmp/somewhere"},
        {"seed", 42},
    };
    RunConfig cfg = parse_config(j);
    CHECK(cfg.n == 5);
    CHECK(cfg.profile().eval(1.0) == 17.0);
    CHECK(cfg.solver.rel_tol == 1e-9);
    CHECK(cfg.solver.max_steps == 50000);
    CHECK(cfg.scan.points == 5);
    CHECK_FALSE(cfg.scan.log_spaced);
    CHECK(cfg.seed == 42);
    auto grid = cfg.scan.grid();
    CHECK(grid.size() == 5);
    CHECK(grid[1] == Catch::Approx(2.575));
  }

  SECTION("unknown keys rejected at every level") {
    CHECK_THROWS_AS(parse_config(json{{"dim", 4}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"solver", {{"tol", 1e-9}}}}),
                    config_error);
    CHECK_THROWS_AS(parse_config(json{{"scan", {{"min", 0.1}}}}),
                    config_error);
    CHECK_THROWS_AS(
        parse_config(json{{"curvature", {{"family", "constant"}, {"K0", 8.0},
                                         {"width", 1}}}}),
        config_error);
  }

  SECTION("bad values rejected") {
    CHECK_THROWS_AS(parse_config(json{{"n", 2}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"n", "four"}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"solver", {{"rel_tol", -1.0}}}}),
                    solver_error);
    RunConfig cfg = parse_config(json{{"scan", {{"points", 0}}}});
    CHECK_THROWS_AS(cfg.scan.grid(), config_error);
  }

  SECTION("malformed file") {
    auto dir = temp_dir("badjson");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_config((dir / "bad.json").string()), config_error);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()),
                    config_error);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("solve writes a certified root for the reference problem") {
  auto dir = temp_dir("solve");
  RunConfig cfg;
  cfg.scan.lambda_min = 0.25;
  cfg.scan.lambda_max = 4.0;
  cfg.scan.points = 9;
  cfg.output_dir = dir.string();
  std::ostringstream log;
  int rc = run_solve(cfg, 1, log);
  CHECK(rc == kExitOk);

  json root = json::parse(slurp(dir / "root.json"));
  CHECK(std::abs(root["lambda1"].get<double>() - 1.0) < 1e-6);
  CHECK(std::abs(root["G_at_root"].get<double>()) < 1e-8);
  CHECK(root["certificate"]["positive"] == true);
  CHECK(root["certificate"]["residual_max"].get<double>() < 1e-6);

  std::string scan = slurp(dir / "scan.csv");
  CHECK(scan.substr(0, 16) == "lambda,G,status\n");
  std::string sol = slurp(dir / "solution.csv");
  CHECK(sol.substr(0, 7) == "r,v,dv\n");

  SECTION("identical runs produce byte-identical artifacts") {
    auto dir2 = temp_dir("solve2");
    RunConfig cfg2 = cfg;
    cfg2.output_dir = dir2.string();
    std::ostringstream log2;
    CHECK(run_solve(cfg2, 1, log2) == kExitOk);
    CHECK(slurp(dir / "scan.csv") == slurp(dir2 / "scan.csv"));
    CHECK(slurp(dir / "root.json") == slurp(dir2 / "root.json"));
    CHECK(slurp(dir / "solution.csv") == slurp(dir2 / "solution.csv"));
    std::filesystem::remove_all(dir2);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve reports a missing bracket") {
  auto dir = temp_dir("nobracket");
  RunConfig cfg;
  cfg.scan.lambda_min = 2.0;
  cfg.scan.lambda_max = 3.0;
  cfg.scan.points = 5;
  cfg.output_dir = dir.string();
  std::ostringstream log;
  CHECK(run_solve(cfg, 1, log) == kExitNoBracket);
  CHECK(std::filesystem::exists(dir / "scan.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "root.json"));
  CHECK(log.str().find("widen") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scan command tabulates and tolerates failures") {
  auto dir = temp_dir("scan");
  RunConfig cfg;
  cfg.curvature = CurvatureProfile::tabulated(
      {0.0, 0.5, 0.8, 0.9, 1.0}, {1.0, 1.0, 50.0, 800.0, 2000.0});
  cfg.scan.lambda_min = 0.05;
  cfg.scan.lambda_max = 5.0;
  cfg.scan.points = 7;
  cfg.output_dir = dir.string();
  std::ostringstream log;
  CHECK(run_scan(cfg, 2, log) == kExitOk);
  std::string csv = slurp(dir / "scan.csv");
  CHECK(csv.find("hitzero") != std::string::npos);
  CHECK(csv.find(",ok") != std::string::npos);
  std::filesystem::remove_all(dir);

  RunConfig bad;
  bad.scan.points = 0;
  std::ostringstream log2;
  CHECK(run_scan(bad, 1, log2) == kExitError);
}

TEST_CASE("verify writes the invariant report") {
  auto dir = temp_dir("verify");
  RunConfig cfg;
  cfg.output_dir = dir.string();
  std::ostringstream log;
  int rc = run_verify(cfg, log);

  json rep = json::parse(slurp(dir / "report.json"));
  REQUIRE(rep.contains("checks"));

  // The n=4, K=8 normalization carries one honest failure: the exact
  // lambda*G at lambda=100 sits 6.0e-4 from the limit -2, outside the 5e-4
  // window (the limit is approached at rate 6/lambda^2). Everything else
  // must pass.
  int fails = 0;
  for (const auto& c : rep["checks"]) {
    if (c["status"] == "fail") {
      ++fails;
      CHECK(c["name"] == "large_lambda_limit");
      double measured = c["measured"].get<double>();
      CHECK(measured > 5.9e-4);
      CHECK(measured < 6.1e-4);
    }
  }
  CHECK(fails == 1);
  CHECK(rc == kExitError);  // exit reflects the failing check

  SECTION("skip logic for tabulated profiles") {
    RunConfig cfg2;
    cfg2.curvature =
        CurvatureProfile::tabulated({0.0, 0.5, 1.0}, {8.0, 7.0, 9.0});
    cfg2.output_dir = dir.string();
    std::ostringstream log2;
    run_verify(cfg2, log2);
    json rep2 = json::parse(slurp(dir / "report.json"));
    bool lemma3_skipped = false, oracle_ran = false;
    for (const auto& c : rep2["checks"]) {
      if (c["name"] == "lemma3_ratio_diagnostics") {
        lemma3_skipped = c["status"] == "skipped";
      }
      if (c["name"] == "integrate_vs_picard") {
        oracle_ran = c["status"] == "pass";
      }
    }
    CHECK(lemma3_skipped);
    CHECK(oracle_ran);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify passes wholesale for an n=3 constant profile") {
  // n=3, K=3: same pipeline, but the strict large-lambda limit window is
  // asserted only for the n=4, K=8 normalization, so the report is clean.
  auto dir = temp_dir("verify3");
  RunConfig cfg;
  cfg.n = 3;
  cfg.output_dir = dir.string();
  std::ostringstream log;
  int rc = run_verify(cfg, log);
  json rep = json::parse(slurp(dir / "report.json"));
  for (const auto& c : rep["checks"]) {
    INFO(c.dump());
    CHECK(c["status"] != "fail");
  }
  CHECK(rc == kExitOk);
  std::filesystem::remove_all(dir);
}
