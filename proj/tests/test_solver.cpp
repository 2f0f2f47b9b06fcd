#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "rpnshoot/analytic.hpp"
#include "rpnshoot/solver.hpp"

using namespace rpnshoot;

namespace {
const CurvatureProfile kConst8 = CurvatureProfile::constant(8.0);
}

TEST_CASE("series start matches the exact solution at the handoff") {
  auto prm = make_params(4);

  auto [v, dv] = series_start(1.0, kConst8, prm, 1e-3);
  CHECK(std::abs(v - oracles::V(1.0, 8.0, 4, 1e-3)) < 1e-15);
  CHECK(std::abs(dv - oracles::dV(1.0, 8.0, 4, 1e-3)) < 1e-12);

  auto [v10, dv10] = series_start(10.0, kConst8, prm, 1e-4);
  CHECK(std::abs(v10 - oracles::V(10.0, 8.0, 4, 1e-4)) <
        1e-14 * oracles::V(10.0, 8.0, 4, 1e-4));

  // r_start -> 0 recovers the initial condition
  auto [v0, dv0] = series_start(3.7, kConst8, prm, 1e-9);
  CHECK(v0 == Catch::Approx(3.7).epsilon(1e-15));
  CHECK(std::abs(dv0) < 1e-8);
}

TEST_CASE("series start rejects an oversized handoff radius") {
  auto prm = make_params(4);
  CHECK_THROWS_AS(series_start(10.0, kConst8, prm, 0.5), start_error);
}

TEST_CASE("integrator reproduces the constant-curvature solution") {
  auto prm = make_params(4);
  Trajectory t = integrate(1.0, kConst8, prm);
  REQUIRE(t.status == TrajectoryStatus::Completed);
  CHECK(std::abs(t.at_end().v - 0.5) < 1e-9);
  CHECK(std::abs(t.at_end().dv - (-0.5)) < 1e-9);

  Trajectory t2 = integrate(2.0, kConst8, prm);
  CHECK(std::abs(t2.eval(0.5).v - 1.0) < 1e-9);

  auto prm5 = make_params(5);
  Trajectory t5 = integrate(1.0, CurvatureProfile::constant(15.0), prm5);
  for (int i = 0; i <= 100; ++i) {
    double r = i / 100.0;
    double ref = std::pow(1.0 + r * r, -1.5);  // oracle for n=5, K=15
    CHECK(std::abs(t5.eval(r).v - ref) < 1e-8 * ref);
  }
}

TEST_CASE("closed-form equivalence across dimensions and heights") {
  for (int n : {3, 4, 5, 6}) {
    auto prm = make_params(n);
    auto K = CurvatureProfile::constant(n * (n - 2.0));
    for (double lam : {0.5, 1.0, 10.0, 100.0}) {
      Trajectory t = integrate(lam, K, prm);
      REQUIRE(t.completed());
      double worst = 0.0;
      for (int i = 0; i <= 100; ++i) {
        double r = i / 100.0;
        double ref = oracles::V(lam, n * (n - 2.0), n, r);
        worst = std::max(worst, std::abs(t.eval(r).v - ref) / ref);
      }
      INFO("n=" << n << " lambda=" << lam);
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("dense output is accurate off the step grid") {
  auto prm = make_params(4);
  Trajectory t = integrate(1.0, kConst8, prm);
  oracles::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    double r = rng.uniform(1e-5, 1.0);
    double ref = oracles::V(1.0, 8.0, 4, r);
    double dref = oracles::dV(1.0, 8.0, 4, r);
    CHECK(std::abs(t.eval(r).v - ref) < 1e-8 * ref);
    CHECK(std::abs(t.eval(r).dv - dref) < 1e-8 * (std::abs(dref) + 0.1));
  }
  CHECK(t.eval(0.0).v == 1.0);
  CHECK(t.eval(0.0).dv == 0.0);
  CHECK_THROWS_AS(t.eval(1.5), solver_error);
  CHECK_THROWS_AS(t.eval(-0.1), solver_error);
}

TEST_CASE("derivative stays non-positive for non-negative curvature") {
  oracles::Rng rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 3 + rng.pick(4);
    auto prm = make_params(n);
    double K0 = rng.uniform(0.5, 10.0);
    CurvatureProfile K =
        trial % 3 == 0
            ? CurvatureProfile::constant(K0)
            : trial % 3 == 1
                  ? CurvatureProfile::power(K0, rng.uniform(-0.5, 2.0) * K0 *
                                                    0.4,
                                            rng.uniform(0.5, 4.0))
                  : CurvatureProfile::tabulated(
                        {0.0, 0.5, 1.0},
                        {K0, rng.uniform(0.0, K0), rng.uniform(0.0, K0)});
    double lam = rng.uniform(0.05, 2.0);
    Trajectory t = integrate(lam, K, prm);
    if (t.status == TrajectoryStatus::BlowUp) continue;
    for (double d : t.dv) CHECK(d <= 1e-14 * lam);
  }
}

TEST_CASE("halving the tolerance moves the endpoint within its error model") {
  auto prm = make_params(4);
  for (double lam : {0.5, 1.0, 10.0}) {
    SolverOptions a, b;
    a.rel_tol = 1e-8;
    b.rel_tol = 5e-9;
    double va = integrate(lam, kConst8, prm, a).at_end().v;
    double vb = integrate(lam, kConst8, prm, b).at_end().v;
    CHECK(std::abs(va - vb) <= 10.0 * (a.rel_tol * std::abs(va) + a.abs_tol));
  }
}

TEST_CASE("zero crossing is detected and refined") {
  auto prm = make_params(4);
  auto killer = CurvatureProfile::tabulated({0.0, 0.5, 0.8, 0.9, 1.0},
                                            {1.0, 1.0, 50.0, 800.0, 2000.0});
  Trajectory t = integrate(2.0, killer, prm);
  REQUIRE(t.status == TrajectoryStatus::HitZero);
  REQUIRE(t.r_star);
  CHECK(*t.r_star < 1.0);
  CHECK(std::abs(t.eval(*t.r_star).v) < 1e-13);
  CHECK(t.coverage_end() == Catch::Approx(*t.r_star));

  SECTION("continuation past the crossing keeps integrating to r = 1") {
    SolverOptions opts;
    opts.continue_past_zero = true;
    Trajectory tc = integrate(2.0, killer, prm, opts);
    CHECK(tc.status == TrajectoryStatus::HitZero);
    REQUIRE(tc.r_star);
    CHECK(*tc.r_star == Catch::Approx(*t.r_star).epsilon(1e-10));
    CHECK(tc.coverage_end() == 1.0);
    CHECK(tc.eval(1.0).v < 0.0);
  }
}

TEST_CASE("blow-up threshold and step budget error paths") {
  auto prm = make_params(4);
  SolverOptions opts;
  opts.blowup_threshold = 0.7;  // below lambda: triggers immediately
  Trajectory t = integrate(1.0, kConst8, prm, opts);
  CHECK(t.status == TrajectoryStatus::BlowUp);
  REQUIRE(t.r_star);

  SolverOptions tiny;
  tiny.max_steps = 5;
  CHECK_THROWS_AS(integrate(1.0, kConst8, prm, tiny), step_budget_error);

  CHECK_THROWS_AS(integrate(-1.0, kConst8, prm), solver_error);
  CHECK_THROWS_AS(integrate(0.0, kConst8, prm), solver_error);
}

TEST_CASE("options validation") {
  SolverOptions opts;
  opts.rel_tol = -1.0;
  CHECK_THROWS_AS(opts.validate(), solver_error);
  SolverOptions opts2;
  opts2.r_start = 1.5;
  CHECK_THROWS_AS(opts2.validate(), solver_error);
}

TEST_CASE("forced outputs land exactly on the requested radii") {
  auto prm = make_params(4);
  SolverOptions opts;
  opts.forced_outputs = {0.123456789, 0.2, 0.77, 0.7700001};
  Trajectory t = integrate(1.0, kConst8, prm, opts);
  for (double q : opts.forced_outputs) {
    bool found = false;
    for (double r : t.r_grid) found = found || r == q;
    CHECK(found);
  }
}

TEST_CASE("a priori bound below the threshold height") {
  // gamma(0) = lambda below (1/2)(n/supK)^(1/(p-1)) forces |v| < 2 lambda.
  oracles::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + rng.pick(4);
    auto prm = make_params(n);
    double K0 = rng.uniform(1.0, 12.0);
    auto K = CurvatureProfile::constant(K0);
    double thresh = 0.5 * std::pow(n / K0, 1.0 / (prm.p - 1.0));
    double lam = thresh * rng.uniform(0.05, 0.999);
    Trajectory t = integrate(lam, K, prm);
    REQUIRE(t.completed());
    for (double v : t.v) CHECK(std::abs(v) < 2.0 * lam);
  }
}
