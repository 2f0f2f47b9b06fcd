#ifndef RPNSHOOT_ANALYTIC_HPP
#define RPNSHOOT_ANALYTIC_HPP

#include <cmath>
#include <string>

#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/params.hpp"
#include "rpnshoot/quadrature.hpp"
#include "rpnshoot/solver.hpp"

namespace rpnshoot {

/// Closed-form solution of the constant-curvature problem,
///   V_lambda(r) = lambda / [1 + lambda^(2 beta) K0 r^2 / (n(n-2))]^(1/beta).
inline double bubble(double lambda, double K0, const ProblemParams& prm,
                     double r) {
  double c = std::pow(lambda, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
  return lambda * std::pow(1.0 + c * r * r, -1.0 / prm.beta);
}

/// dV_lambda/dr in closed form.
inline double bubble_derivative(double lambda, double K0,
                                const ProblemParams& prm, double r) {
  double c = std::pow(lambda, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
  return -(2.0 * c / prm.beta) * lambda * r *
         std::pow(1.0 + c * r * r, -1.0 / prm.beta - 1.0);
}

/// First-order small-lambda expansion data:
///   v ~ lambda - lambda^p I(r),  v' ~ -lambda^p J(r)
/// with I(r) = int_0^r s^(1-n) int_0^s t^(n-1) K dt ds and
///      J(r) = int_0^r t^(n-1) K dt.
struct AsymptoticPair {
  double v_approx;
  double dv_approx;
  double I;
  double J;
};

namespace detail {

inline double inner_moment(const CurvatureProfile& K, const ProblemParams& prm,
                           double s, double tol) {
  if (s == 0.0) return 0.0;
  return integrate_adaptive(
      [&](double t) { return std::pow(t, prm.n - 1.0) * K.eval(t); }, 0.0, s,
      tol);
}

}  // namespace detail

/// Nested adaptive quadrature for (I, J); absolute tolerance 1e-12 so the
/// results can feed asymptotic-order checks that difference nearly equal
/// quantities.
inline AsymptoticPair corollary1_expansion(double lambda,
                                           const CurvatureProfile& K,
                                           const ProblemParams& prm,
                                           double r) {
  if (!(r >= 0.0) || r > 1.0) {
    throw solver_error("expansion radius must lie in [0, 1]");
  }
  constexpr double kTol = 1e-12;
  double J = detail::inner_moment(K, prm, r, kTol);
  double I = 0.0;
  if (r > 0.0) {
    I = integrate_adaptive(
        [&](double s) {
          if (s == 0.0) return 0.0;
          return detail::inner_moment(K, prm, s, 0.1 * kTol) /
                 std::pow(s, prm.n - 1.0);
        },
        0.0, r, kTol);
  }
  double lp = std::pow(lambda, prm.p);
  return {lambda - lp * I, -lp * J, I, J};
}

/// a, b, gamma of the integral representation
///   v(r) = a(eps) + b(eps) r^(2-n) - int_eps^r s^(1-n) int_eps^s t^(n-1) v^p K dt ds
/// evaluated on a trajectory, together with the a-priori threshold
///   (1/2) (n / sup K)^(1/(p-1)).
struct Lemma1Data {
  double epsilon;
  double a;
  double b;
  double gamma;
  double threshold;
};

inline Lemma1Data lemma1_data(const Trajectory& traj, double epsilon,
                              const CurvatureProfile& K,
                              const ProblemParams& prm) {
  if (!(epsilon >= 0.0) || epsilon > traj.coverage_end()) {
    throw solver_error("epsilon outside the trajectory coverage");
  }
  TrajState s = traj.eval(epsilon);
  double nm2 = prm.n - 2.0;
  Lemma1Data out;
  out.epsilon = epsilon;
  out.a = s.v + epsilon * s.dv / nm2;
  out.b = -std::pow(epsilon, prm.n - 1.0) * s.dv / nm2;
  if (epsilon == 0.0) {
    out.gamma = std::abs(out.a);
  } else {
    // |a| + |b eps^(2-n)|, identically |v + eps v'/(n-2)| + |eps v'/(n-2)|.
    double direct = std::abs(s.v + epsilon * s.dv / nm2) +
                    std::abs(epsilon * s.dv / nm2);
    double via_b = std::abs(out.a) +
                   std::abs(out.b * std::pow(epsilon, 2.0 - prm.n));
    if (std::abs(direct - via_b) >
        1e-12 * std::max(1.0, std::abs(direct))) {
      throw solver_error("gamma consistency check failed");
    }
    out.gamma = direct;
  }
  out.threshold =
      0.5 * std::pow(prm.n / K.sup_norm(), 1.0 / (prm.p - 1.0));
  return out;
}

/// Result of checking |v| < 2 gamma(eps) on [eps, 1].
struct Lemma1Report {
  bool hypothesis_met;  // gamma(eps) < threshold
  bool bound_holds;     // |v| < 2 gamma on the grid (meaningful when met)
  double gamma;
  double threshold;
  double sup_abs_v;
  double margin;  // 2 gamma - sup |v|
};

inline Lemma1Report lemma1_bound_holds(const Trajectory& traj, double epsilon,
                                       const CurvatureProfile& K,
                                       const ProblemParams& prm) {
  Lemma1Data d = lemma1_data(traj, epsilon, K, prm);
  Lemma1Report rep;
  rep.gamma = d.gamma;
  rep.threshold = d.threshold;
  rep.hypothesis_met = d.gamma < d.threshold;
  double hi = traj.coverage_end();
  double sup = 0.0;
  constexpr int kGrid = 1000;
  for (int i = 0; i <= kGrid; ++i) {
    double r = epsilon + (hi - epsilon) * i / kGrid;
    sup = std::max(sup, std::abs(traj.eval(r).v));
  }
  rep.sup_abs_v = sup;
  rep.margin = 2.0 * d.gamma - sup;
  rep.bound_holds = rep.hypothesis_met && sup < 2.0 * d.gamma;
  return rep;
}

/// Leading large-lambda term of the gluing function,
///   [n(n-2)/K0]^((n-2)/2) (2-n) / lambda.
inline double large_lambda_G_prediction(double K0, const ProblemParams& prm,
                                        double lambda) {
  if (!(lambda > 0.0) || !(K0 > 0.0)) {
    throw solver_error("prediction requires lambda > 0 and K0 > 0");
  }
  return std::pow(prm.n * (prm.n - 2.0) / K0, 0.5 * (prm.n - 2.0)) *
         (2.0 - prm.n) / lambda;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_ANALYTIC_HPP
