#ifndef RPNSHOOT_GLUING_HPP
#define RPNSHOOT_GLUING_HPP

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rpnshoot/analytic.hpp"
#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/params.hpp"
#include "rpnshoot/solver.hpp"

namespace rpnshoot {

// The shot solution and its Kelvin reflection glue to a C^1 function on
// [0, infinity) exactly when
//   G(lambda) = (n-2) v_lambda(1) + 2 v'_lambda(1) = 0,
// so root finding on G in the initial height is the whole game.

enum class SampleStatus { Ok, HitZero, BlowUp, StepBudget };

inline const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::HitZero: return "hitzero";
    case SampleStatus::BlowUp: return "blowup";
    case SampleStatus::StepBudget: return "stepbudget";
  }
  return "unknown";
}

struct GluingResult {
  double lambda = 0.0;
  SampleStatus status = SampleStatus::Ok;
  double G = 0.0;                 // meaningful only when status == Ok
  std::optional<double> r_star;   // failure radius for HitZero / BlowUp

  bool ok() const { return status == SampleStatus::Ok; }
};

/// G(lambda), or a typed failure carrying the trajectory status. Failures are
/// data, not exceptions, so scans can continue across them.
inline GluingResult gluing_value(double lambda, const CurvatureProfile& K,
                                 const ProblemParams& prm,
                                 const SolverOptions& opts = {}) {
  GluingResult res;
  res.lambda = lambda;
  try {
    Trajectory traj = integrate(lambda, K, prm, opts);
    switch (traj.status) {
      case TrajectoryStatus::Completed: {
        TrajState end = traj.at_end();
        res.G = (prm.n - 2.0) * end.v + 2.0 * end.dv;
        break;
      }
      case TrajectoryStatus::HitZero:
        res.status = SampleStatus::HitZero;
        res.r_star = traj.r_star;
        break;
      case TrajectoryStatus::BlowUp:
        res.status = SampleStatus::BlowUp;
        res.r_star = traj.r_star;
        break;
    }
  } catch (const step_budget_error&) {
    res.status = SampleStatus::StepBudget;
  }
  return res;
}

struct GluingScan {
  std::vector<GluingResult> samples;                   // sorted by lambda
  std::vector<std::pair<double, double>> bracket_pairs;
  std::vector<double> roots;
};

inline double find_root(const CurvatureProfile& K, const ProblemParams& prm,
                        std::pair<double, double> bracket,
                        const SolverOptions& opts = {},
                        double root_tol = 1e-9);

/// Evaluate G over an ascending lambda grid, record sign-change brackets
/// between consecutive ok samples, and refine each bracket to a root.
/// Samples are independent, so they may be evaluated in parallel; the scan is
/// assembled in lambda order regardless.
inline GluingScan scan_gluing(const CurvatureProfile& K,
                              const ProblemParams& prm,
                              const std::vector<double>& lambda_grid,
                              const SolverOptions& opts = {}, int jobs = 1,
                              double root_tol = 1e-9) {
  if (lambda_grid.empty()) {
    throw solver_error("scan requires a non-empty lambda grid");
  }
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0) ||
        (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))) {
      throw solver_error("lambda grid must be positive and ascending");
    }
  }

  GluingScan scan;
  scan.samples.resize(lambda_grid.size());
  if (jobs <= 1 || lambda_grid.size() == 1) {
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      scan.samples[i] = gluing_value(lambda_grid[i], K, prm, opts);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next.fetch_add(1); i < lambda_grid.size();
           i = next.fetch_add(1)) {
        scan.samples[i] = gluing_value(lambda_grid[i], K, prm, opts);
      }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min<int>(jobs, static_cast<int>(lambda_grid.size()));
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i + 1 < scan.samples.size(); ++i) {
    const GluingResult& a = scan.samples[i];
    const GluingResult& b = scan.samples[i + 1];
    if (a.ok() && b.ok() && a.G != 0.0 && b.G != 0.0 &&
        std::signbit(a.G) != std::signbit(b.G)) {
      scan.bracket_pairs.emplace_back(a.lambda, b.lambda);
    }
  }
  for (const auto& br : scan.bracket_pairs) {
    scan.roots.push_back(find_root(K, prm, br, opts, root_tol));
  }
  return scan;
}

/// Refine a sign-change bracket to |G| < root_tol (or bracket width below
/// root_tol * lambda) by bisection with secant acceleration. An integrator
/// failure inside the bracket invalidates the certificate and is an error.
inline double find_root(const CurvatureProfile& K, const ProblemParams& prm,
                        std::pair<double, double> bracket,
                        const SolverOptions& opts, double root_tol) {
  auto eval = [&](double lam) {
    GluingResult res = gluing_value(lam, K, prm, opts);
    if (!res.ok()) {
      throw bracket_invalid_error(
          "integrator failure (" + std::string(to_string(res.status)) +
              ") inside the root bracket at lambda = " + std::to_string(lam),
          lam);
    }
    return res.G;
  };

  double a = bracket.first;
  double b = bracket.second;
  if (!(a > 0.0) || !(b > a)) {
    throw solver_error("root bracket must satisfy 0 < lambda_lo < lambda_hi");
  }
  double fa = eval(a);
  double fb = eval(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb)) {
    throw solver_error("bracket endpoints must have opposite signs of G");
  }

  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double best_f = std::abs(fa) < std::abs(fb) ? fa : fb;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(best_f) < root_tol || (b - a) < root_tol * a) {
      return best;
    }
    double mid = 0.5 * (a + b);
    double cand = mid;
    if (fb != fa) {
      double secant = b - fb * (b - a) / (fb - fa);
      // Accept the secant point only when it falls safely inside the bracket.
      if (secant > a + 0.01 * (b - a) && secant < b - 0.01 * (b - a)) {
        cand = secant;
      }
    }
    double fc = eval(cand);
    if (std::abs(fc) < std::abs(best_f)) {
      best = cand;
      best_f = fc;
    }
    if (fc == 0.0) return cand;
    if (std::signbit(fc) == std::signbit(fa)) {
      a = cand;
      fa = fc;
    } else {
      b = cand;
      fb = fc;
    }
  }
  return best;
}

/// Trajectory-existence predicate behind the lambda_0 / lambda_inf
/// thresholds: the shot solution reaches r = 1 staying positive.
inline bool exists_positive(double lambda, const CurvatureProfile& K,
                            const ProblemParams& prm,
                            const SolverOptions& opts = {}) {
  try {
    Trajectory traj = integrate(lambda, K, prm, opts);
    return traj.completed() && traj.positive();
  } catch (const step_budget_error&) {
    return false;
  }
}

struct ThresholdEstimate {
  enum class Kind {
    Bounded,         // boundary located inside the probed range
    AtOrBeyondCap,   // predicate held at every probe up to the cap
    AllProbedExist,  // predicate held on the whole downward probe grid
    NotBracketed,    // predicate already failed at the cap (lambda_inf only)
  };
  Kind kind;
  double value = 0.0;  // boundary estimate when kind == Bounded
  double probe_lo = 0.0;
  double probe_hi = 0.0;
};

/// Estimate the largest initial height below which every probed shot exists
/// and stays positive. Existence is guaranteed for small lambda, so the
/// bottom probe failing is a diagnostic error. Never claims infinity: when
/// nothing fails up to the cap the probed range is reported instead.
inline ThresholdEstimate estimate_lambda0(const CurvatureProfile& K,
                                          const ProblemParams& prm,
                                          const SolverOptions& opts,
                                          double lambda_max) {
  if (!(lambda_max > 0.0)) {
    throw solver_error("lambda_max must be positive");
  }
  double probe = 1e-6;
  if (!exists_positive(probe, K, prm, opts)) {
    throw solver_error(
        "existence predicate failed at lambda = 1e-6, which contradicts the "
        "small-lambda a-priori bound; check the profile");
  }
  double good = probe;
  double bad = 0.0;
  bool found = false;
  for (double lam = 10.0 * probe; lam <= lambda_max * (1.0 + 1e-12);
       lam *= 10.0) {
    if (exists_positive(lam, K, prm, opts)) {
      good = lam;
    } else {
      bad = lam;
      found = true;
      break;
    }
  }
  ThresholdEstimate est;
  est.probe_lo = probe;
  est.probe_hi = lambda_max;
  if (!found) {
    est.kind = ThresholdEstimate::Kind::AtOrBeyondCap;
    est.value = lambda_max;
    return est;
  }
  while (bad - good > 1e-4 * good) {
    double mid = std::sqrt(good * bad);
    if (exists_positive(mid, K, prm, opts)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  est.kind = ThresholdEstimate::Kind::Bounded;
  est.value = 0.5 * (good + bad);
  return est;
}

/// Mirror image: the smallest height above which every probed shot exists.
inline ThresholdEstimate estimate_lambda_inf(const CurvatureProfile& K,
                                             const ProblemParams& prm,
                                             const SolverOptions& opts,
                                             double lambda_max) {
  if (!(lambda_max > 0.0)) {
    throw solver_error("lambda_max must be positive");
  }
  ThresholdEstimate est;
  est.probe_lo = 1e-2;
  est.probe_hi = lambda_max;
  if (!exists_positive(lambda_max, K, prm, opts)) {
    est.kind = ThresholdEstimate::Kind::NotBracketed;
    est.value = lambda_max;
    return est;
  }
  double good = lambda_max;  // predicate holds here
  double bad = 0.0;
  bool found = false;
  for (double lam = lambda_max / 10.0; lam >= est.probe_lo * (1.0 - 1e-12);
       lam /= 10.0) {
    if (exists_positive(lam, K, prm, opts)) {
      good = lam;
    } else {
      bad = lam;
      found = true;
      break;
    }
  }
  if (!found) {
    est.kind = ThresholdEstimate::Kind::AllProbedExist;
    est.value = est.probe_lo;
    return est;
  }
  while (good - bad > 1e-4 * bad) {
    double mid = std::sqrt(good * bad);
    if (exists_positive(mid, K, prm, opts)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  est.kind = ThresholdEstimate::Kind::Bounded;
  est.value = 0.5 * (good + bad);
  return est;
}

/// Large-lambda convergence diagnostics of the ratio T = v / V against the
/// constant-curvature bubble: T(1) -> 1, the log-derivative gap
/// v'/v - V'/V = T'/T -> 0, and v'(1)/v(1) -> 2 - n.
struct RatioDiagnostics {
  double lambda;
  SampleStatus status;
  double T1 = 0.0;
  double logderiv_gap = 0.0;
  double logderiv_v = 0.0;
  double G = 0.0;
};

inline std::vector<RatioDiagnostics> ratio_diagnostics(
    const std::vector<double>& lambdas, const CurvatureProfile& K,
    const ProblemParams& prm, const SolverOptions& opts = {}) {
  if (!K.smooth_at_zero()) {
    throw solver_error(
        "ratio diagnostics require a profile smooth at r = 0 (closed "
        "families only)");
  }
  std::vector<RatioDiagnostics> out;
  out.reserve(lambdas.size());
  double K0 = K.at_zero();
  for (double lam : lambdas) {
    RatioDiagnostics d;
    d.lambda = lam;
    d.status = SampleStatus::Ok;
    try {
      Trajectory traj = integrate(lam, K, prm, opts);
      if (traj.status == TrajectoryStatus::HitZero) {
        d.status = SampleStatus::HitZero;
      } else if (traj.status == TrajectoryStatus::BlowUp) {
        d.status = SampleStatus::BlowUp;
      } else {
        TrajState end = traj.at_end();
        double V1 = bubble(lam, K0, prm, 1.0);
        double dV1 = bubble_derivative(lam, K0, prm, 1.0);
        d.T1 = end.v / V1;
        d.logderiv_v = end.dv / end.v;
        d.logderiv_gap = d.logderiv_v - dV1 / V1;
        d.G = (prm.n - 2.0) * end.v + 2.0 * end.dv;
      }
    } catch (const step_budget_error&) {
      d.status = SampleStatus::StepBudget;
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_GLUING_HPP
