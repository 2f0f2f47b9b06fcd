#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "rpnshoot/analytic.hpp"

using namespace rpnshoot;

TEST_CASE("bubble point values") {
  auto prm4 = make_params(4);
  CHECK(bubble(2.0, 8.0, prm4, 0.5) == Catch::Approx(1.0).margin(1e-15));
  CHECK(bubble(7.3, 8.0, prm4, 0.0) == 7.3);
  CHECK(bubble_derivative(1.0, 8.0, prm4, 1.0) ==
        Catch::Approx(-0.5).margin(1e-15));
  CHECK(bubble_derivative(5.0, 3.0, prm4, 0.0) == 0.0);

  // n=3, K0=3, lambda=1, r=1: c = 1, value (1+1)^(-1/2)
  auto prm3 = make_params(3);
  CHECK(bubble(1.0, 3.0, prm3, 1.0) ==
        Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-15));
}

TEST_CASE("bubble solves the equation") {
  oracles::Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    int n = 3 + rng.pick(6);
    auto prm = make_params(n);
    double K0 = rng.uniform(0.3, 30.0);
    double lam = std::pow(10.0, rng.uniform(-1.5, 1.5));
    double r = rng.uniform(0.01, 2.0);
    double V = bubble(lam, K0, prm, r);
    double res = oracles::d2V(lam, K0, n, r) +
                 (n - 1.0) / r * bubble_derivative(lam, K0, prm, r) +
                 K0 * std::pow(V, prm.p);
    worst = std::max(worst, std::abs(res) / (K0 * std::pow(V, prm.p)));
    // closed-form derivative agrees with the library's
    CHECK(bubble_derivative(lam, K0, prm, r) ==
          Catch::Approx(oracles::dV(lam, K0, n, r)).epsilon(1e-13));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("bubble derivative matches central differences") {
  auto prm = make_params(4);
  oracles::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    double r = rng.uniform(0.05, 1.5);
    double h = 1e-6 * std::max(r, 0.1);
    double fd = (bubble(1.0, 8.0, prm, r + h) - bubble(1.0, 8.0, prm, r - h)) /
                (2.0 * h);
    double cf = bubble_derivative(1.0, 8.0, prm, r);
    CHECK(std::abs(fd - cf) < 1e-8 * std::abs(cf));
  }
}

TEST_CASE("bubble is Kelvin invariant exactly at the gluing scale") {
  // lambda^(2 beta) K0 / (n(n-2)) = 1  <=>  V(r) = r^(2-n) V(1/r)
  oracles::Rng rng(17);
  for (int n : {3, 4, 5, 6}) {
    auto prm = make_params(n);
    double K0 = n * (n - 2.0);
    for (int i = 0; i < 50; ++i) {
      double r = rng.uniform(0.1, 10.0);
      double lhs = bubble(1.0, K0, prm, r);
      double rhs = std::pow(r, 2.0 - n) * bubble(1.0, K0, prm, 1.0 / r);
      CHECK(lhs == Catch::Approx(rhs).epsilon(1e-14));
    }
  }
}

TEST_CASE("first-order expansion moments") {
  auto prm = make_params(4);
  auto K = CurvatureProfile::constant(8.0);

  AsymptoticPair ap = corollary1_expansion(0.3, K, prm, 1.0);
  CHECK(ap.I == Catch::Approx(1.0).margin(1e-11));
  CHECK(ap.J == Catch::Approx(2.0).margin(1e-11));
  CHECK(ap.v_approx == Catch::Approx(0.3 - 0.027).margin(1e-11));
  CHECK(ap.dv_approx == Catch::Approx(-2.0 * 0.027).margin(1e-11));

  AsymptoticPair zero = corollary1_expansion(0.3, K, prm, 0.0);
  CHECK(zero.v_approx == 0.3);
  CHECK(zero.dv_approx == 0.0);
  CHECK(zero.I == 0.0);
  CHECK(zero.J == 0.0);

  // closed forms K r^2/(2n), K r^n/n at interior radii too
  for (double r : {0.25, 0.5, 0.75}) {
    AsymptoticPair a = corollary1_expansion(0.1, K, prm, r);
    CHECK(a.I == Catch::Approx(8.0 * r * r / 8.0).margin(1e-11));
    CHECK(a.J == Catch::Approx(8.0 * std::pow(r, 4.0) / 4.0).margin(1e-11));
  }
  CHECK_THROWS_AS(corollary1_expansion(0.1, K, prm, 1.5), solver_error);
}

TEST_CASE("nested quadrature agrees with the order-swapped reduction") {
  // I(r) = [ int_0^r t K dt - r^(2-n) J(r) ] / (n-2) by switching the order
  // of integration; an independent route through the same double integral.
  auto K = CurvatureProfile::power(8.0, 1.0, 2.0);
  for (int n : {3, 4, 6}) {
    auto prm = make_params(n);
    for (double r : {0.3, 0.7, 1.0}) {
      AsymptoticPair ap = corollary1_expansion(0.1, K, prm, r);
      double tK = integrate_adaptive(
          [&](double t) { return t * K.eval(t); }, 0.0, r, 1e-13);
      double fubini = (tK - std::pow(r, 2.0 - n) * ap.J) / (n - 2.0);
      CHECK(ap.I == Catch::Approx(fubini).margin(1e-10));
    }
  }
}

TEST_CASE("remainder scales like lambda^(2p-1)") {
  for (int n : {3, 4, 5}) {
    auto prm = make_params(n);
    double K0 = n * (n - 2.0);
    double lam = n == 3 ? 1e-2 : 2e-2;
    double R1 = std::abs(oracles::expansion_gap(lam, K0, n));
    double R2 = std::abs(oracles::expansion_gap(0.5 * lam, K0, n));
    double order = std::log2(R1 / R2);
    CHECK(std::abs(order - (2.0 * prm.p - 1.0)) < 0.3);
  }
}

TEST_CASE("lemma 1 data and threshold") {
  auto prm = make_params(4);
  auto K = CurvatureProfile::constant(8.0);
  Trajectory t = integrate(1.0, K, prm);

  Lemma1Data at0 = lemma1_data(t, 0.0, K, prm);
  CHECK(at0.a == Catch::Approx(1.0).margin(1e-9));
  CHECK(at0.b == 0.0);
  CHECK(at0.gamma == Catch::Approx(1.0).margin(1e-9));
  CHECK(at0.threshold == Catch::Approx(0.353553).margin(1e-6));

  Lemma1Data at1 = lemma1_data(t, 1.0, K, prm);
  CHECK(at1.a == Catch::Approx(0.25).margin(1e-8));
  CHECK(at1.b == Catch::Approx(0.25).margin(1e-8));
  CHECK(at1.gamma == Catch::Approx(0.5).margin(1e-8));

  CHECK_THROWS_AS(lemma1_data(t, 1.2, K, prm), solver_error);
}

TEST_CASE("lemma 1 bound report") {
  auto prm = make_params(4);
  auto K = CurvatureProfile::constant(8.0);

  Trajectory small = integrate(0.2, K, prm);
  Lemma1Report met = lemma1_bound_holds(small, 0.0, K, prm);
  CHECK(met.hypothesis_met);
  CHECK(met.bound_holds);
  CHECK(met.sup_abs_v == Catch::Approx(0.2).margin(1e-9));
  CHECK(met.margin > 0.0);
  CHECK(met.margin == Catch::Approx(2.0 * met.gamma - met.sup_abs_v));

  Trajectory big = integrate(1.0, K, prm);
  Lemma1Report unmet = lemma1_bound_holds(big, 0.0, K, prm);
  CHECK_FALSE(unmet.hypothesis_met);
}

TEST_CASE("large-height gluing prediction") {
  auto prm = make_params(4);
  CHECK(large_lambda_G_prediction(8.0, prm, 100.0) ==
        Catch::Approx(-0.02).margin(1e-15));
  CHECK(large_lambda_G_prediction(8.0, prm, 1e6) < 0.0);
  CHECK(std::abs(large_lambda_G_prediction(8.0, prm, 1e6)) < 1e-5);
  CHECK_THROWS_AS(large_lambda_G_prediction(8.0, prm, -1.0), solver_error);

  // exact lambda*G approaches the prediction's constant from above in gap
  double sym100 = 100.0 * oracles::G(100.0, 8.0, 4);
  CHECK(std::abs(sym100 - (-2.0)) < 1e-3);
  CHECK(std::abs(sym100 - (-1.99940010)) < 1e-7);
}
