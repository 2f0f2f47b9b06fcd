#ifndef RPNSHOOT_VERIFY_HPP
#define RPNSHOOT_VERIFY_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpnshoot/analytic.hpp"
#include "rpnshoot/config.hpp"
#include "rpnshoot/curvature.hpp"
#include "rpnshoot/detail/rng.hpp"
#include "rpnshoot/gluing.hpp"
#include "rpnshoot/kelvin.hpp"
#include "rpnshoot/params.hpp"
#include "rpnshoot/picard.hpp"
#include "rpnshoot/quadrature.hpp"
#include "rpnshoot/solver.hpp"

namespace rpnshoot {

enum class CheckStatus { Pass, Fail, Skipped, Info };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Info: return "info";
  }
  return "unknown";
}

struct CheckResult {
  std::string name;
  CheckStatus status;
  std::optional<double> measured;
  std::optional<double> tolerance;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (c.status == CheckStatus::Fail) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    int pass = 0, fail = 0, skipped = 0;
    for (const auto& c : checks) {
      nlohmann::json jc;
      jc["name"] = c.name;
      jc["status"] = to_string(c.status);
      if (c.measured) jc["measured"] = *c.measured;
      if (c.tolerance) jc["tolerance"] = *c.tolerance;
      if (!c.detail.empty()) jc["detail"] = c.detail;
      j["checks"].push_back(jc);
      if (c.status == CheckStatus::Pass) ++pass;
      if (c.status == CheckStatus::Fail) ++fail;
      if (c.status == CheckStatus::Skipped) ++skipped;
    }
    j["summary"]["pass"] = pass;
    j["summary"]["fail"] = fail;
    j["summary"]["skipped"] = skipped;
    j["notes"] = notes;
    return j;
  }
};

namespace detail {

inline double bubble_second_derivative(double lambda, double K0,
                                       const ProblemParams& prm, double r) {
  double c = std::pow(lambda, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
  double u = 1.0 + c * r * r;
  return -(2.0 * c / prm.beta) * lambda * std::pow(u, -1.0 / prm.beta - 2.0) *
         (1.0 - (1.0 + 2.0 / prm.beta) * c * r * r);
}

/// Closed-form gluing value for constant curvature,
///   G(lambda) = (n-2) lambda (1-c) (1+c)^(-1/beta - 1),
///   c = lambda^(2 beta) K0 / (n(n-2)).
inline double symbolic_gluing(double lambda, double K0,
                              const ProblemParams& prm) {
  double c = std::pow(lambda, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
  return (prm.n - 2.0) * lambda * (1.0 - c) *
         std::pow(1.0 + c, -1.0 / prm.beta - 1.0);
}

/// Cancellation-free small-lambda expansion gap for constant curvature:
///   v(1) - lambda + lambda^p I(1) = lambda [(1+c)^(-1/beta) - 1 + c/beta]
/// with I(1) = K0/(2n) exact, evaluated through expm1/log1p because the
/// bracket is O(c^2) while its terms are O(c).
inline double stable_expansion_gap(double lambda, double K0,
                                   const ProblemParams& prm) {
  double c = std::pow(lambda, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
  return lambda * (std::expm1(-std::log1p(c) / prm.beta) + c / prm.beta);
}

inline std::vector<double> logspace(double lo, double hi, int points) {
  std::vector<double> g;
  g.reserve(points);
  for (int i = 0; i < points; ++i) {
    double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    g.push_back(lo * std::pow(hi / lo, t));
  }
  return g;
}

}  // namespace detail

/// Run the full invariant suite for one (n, K) configuration. Checks whose
/// hypotheses the profile does not meet are reported as skipped rather than
/// failed; estimator outputs are informational.
inline VerifyReport run_verification(const RunConfig& cfg) {
  VerifyReport rep;
  ProblemParams prm = make_params(cfg.n);
  CurvatureProfile K = cfg.profile();
  SolverOptions opts = cfg.solver;
  detail::Rng rng(cfg.seed);
  const bool constant_K = K.is_constant();
  const double K0 = K.at_zero();

  auto add = [&](std::string name, CheckStatus st, std::optional<double> meas,
                 std::optional<double> tol, std::string detail_text) {
    rep.checks.push_back(
        {std::move(name), st, meas, tol, std::move(detail_text)});
  };
  auto add_bound = [&](std::string name, double measured, double tol,
                       std::string detail_text = "") {
    add(std::move(name),
        measured < tol ? CheckStatus::Pass : CheckStatus::Fail, measured, tol,
        std::move(detail_text));
  };

  // Exponent identities p = (n+2)/(n-2), beta = 2/(n-2) = (p-1)/2.
  {
    double gap = std::abs(prm.beta - 0.5 * (prm.p - 1.0));
    add_bound("exponent_identities", gap, 4e-16 * prm.beta);
  }

  // Profile sanity: K(0) > 0, K >= 0, symmetrization identity exact.
  {
    bool ok = K.at_zero() > 0.0;
    double minv = K.at_zero();
    for (int i = 0; i < 1000; ++i) {
      double r = rng.next_double();
      double val = K.eval(r);
      minv = std::min(minv, val);
      ok = ok && val >= 0.0;
      if (K.symmetrized() && r > 0.0) {
        ok = ok && K.eval(1.0 / r) == val;
      }
    }
    add("profile_nonnegative", ok ? CheckStatus::Pass : CheckStatus::Fail,
        minv, 0.0, "min sampled K");
  }

  // Closed-form bubble solves the constant-curvature equation.
  {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      double lam = std::pow(10.0, rng.uniform(-1.0, 1.0));
      double r = rng.uniform(0.01, 1.0);
      double V = bubble(lam, K0, prm, r);
      double res = detail::bubble_second_derivative(lam, K0, prm, r) +
                   (prm.n - 1.0) / r * bubble_derivative(lam, K0, prm, r) +
                   K0 * signed_power(V, prm.p);
      worst = std::max(worst, std::abs(res) / (K0 * std::pow(V, prm.p)));
    }
    add_bound("bubble_ode_residual", worst, 1e-9);
  }

  // Series handoff agrees with the bubble (constant K only). Measured as the
  // max of error/tolerance ratios: 1e-12 relative-to-lambda for v, 1e-8
  // relative for v'.
  if (constant_K) {
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 10.0}) {
      double r0 = default_r_start(lam, K, prm);
      auto [v, dv] = series_start(lam, K, prm, r0);
      double vgap = std::abs(v - bubble(lam, K0, prm, r0)) / lam;
      double dref = bubble_derivative(lam, K0, prm, r0);
      double dgap = std::abs(dv - dref) / std::abs(dref);
      worst = std::max({worst, vgap / 1e-12, dgap / 1e-8});
    }
    add_bound("series_start_vs_bubble", worst, 1.0,
              "max error/tolerance ratio over v and v'");
  } else {
    add("series_start_vs_bubble", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: constant curvature");
  }

  // Integrator reproduces the bubble (constant K only).
  if (constant_K) {
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 10.0}) {
      Trajectory traj = integrate(lam, K, prm, opts);
      for (int i = 0; i <= 200; ++i) {
        double r = i / 200.0;
        double ref = bubble(lam, K0, prm, r);
        worst = std::max(worst, std::abs(traj.eval(r).v - ref) / ref);
      }
    }
    add_bound("integrate_vs_bubble", worst, 1e-8);
  } else {
    add("integrate_vs_bubble", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: constant curvature");
  }

  // Two independent solution routes agree.
  {
    double worst = 0.0;
    double thresh = 0.5 * std::pow(prm.n / K.sup_norm(), 1.0 / (prm.p - 1.0));
    for (int i = 0; i < 5; ++i) {
      double lam = std::min(0.5, 0.7 * thresh) * rng.uniform(0.3, 1.0);
      Trajectory traj = integrate(lam, K, prm, opts);
      PicardTable tab = picard_oracle(lam, K, prm, 1.0, 150, 4000);
      for (std::size_t k = 0; k < tab.r.size(); k += 7) {
        worst = std::max(worst, std::abs(traj.eval(tab.r[k]).v - tab.v[k]) /
                                    std::abs(tab.v[k]));
      }
    }
    add_bound("integrate_vs_picard", worst, 1e-6);
  }

  // Representation v(r) = a(eps) + b(eps) r^(2-n) - nested integral, checked
  // by quadrature over the computed trajectory.
  {
    double lam = 0.4 * std::pow(prm.n / K.sup_norm(), 1.0 / (prm.p - 1.0));
    Trajectory traj = integrate(lam, K, prm, opts);
    double eps = 0.3, r = 1.0;
    Lemma1Data d = lemma1_data(traj, eps, K, prm);
    auto inner = [&](double s) {
      return integrate_adaptive(
          [&](double t) {
            return std::pow(t, prm.n - 1.0) * K.eval(t) *
                   signed_power(traj.eval(t).v, prm.p);
          },
          eps, s, 1e-13);
    };
    double nested = integrate_adaptive(
        [&](double s) { return inner(s) / std::pow(s, prm.n - 1.0); }, eps, r,
        1e-12);
    double rhs = d.a + d.b * std::pow(r, 2.0 - prm.n) - nested;
    double gap = std::abs(traj.eval(r).v - rhs) / lam;
    add_bound("integral_representation", gap, 1e-8);
  }

  // A-priori bound |v| < 2 gamma(0) for heights below the threshold.
  {
    double thresh = 0.5 * std::pow(prm.n / K.sup_norm(), 1.0 / (prm.p - 1.0));
    double worst_margin = 1e300;
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
      double lam = thresh * rng.uniform(0.05, 0.999);
      Trajectory traj = integrate(lam, K, prm, opts);
      Lemma1Report r1 = lemma1_bound_holds(traj, 0.0, K, prm);
      ok = ok && r1.hypothesis_met && r1.bound_holds;
      worst_margin = std::min(worst_margin, r1.margin);
    }
    add("lemma1_bound", ok ? CheckStatus::Pass : CheckStatus::Fail,
        worst_margin, 0.0, "min margin 2*gamma - sup|v|");
  }

  // Remainder of the first-order small-lambda expansion scales as
  // lambda^(2p-1).
  {
    double lam_hi = prm.n == 3 ? 0.1 : 0.02;
    double order_tol = prm.n == 3 ? 0.5 : 0.3;
    auto remainder = [&](double lam) {
      AsymptoticPair ap = corollary1_expansion(lam, K, prm, 1.0);
      if (constant_K) {
        // v(1) - lambda + lambda^p I splits into the cancellation-free
        // closed-form gap plus the quadrature defect of I.
        return std::abs(detail::stable_expansion_gap(lam, K0, prm) +
                        std::pow(lam, prm.p) *
                            (ap.I - K0 / (2.0 * prm.n)));
      }
      PicardTable tab = picard_oracle(lam, K, prm, 1.0, 80, 16000);
      return std::abs(tab.v.back() - ap.v_approx);
    };
    double order = std::log2(remainder(lam_hi) / remainder(0.5 * lam_hi));
    double expected = 2.0 * prm.p - 1.0;
    add_bound("corollary1_order", std::abs(order - expected), order_tol,
              "deviation of log2 remainder ratio from 2p-1");
  }

  // Constant-K moments have closed forms I = K r^2 / (2n), J = K r^n / n.
  if (constant_K) {
    AsymptoticPair ap = corollary1_expansion(0.1, K, prm, 1.0);
    double gap = std::max(std::abs(ap.I - K0 / (2.0 * prm.n)),
                          std::abs(ap.J - K0 / prm.n));
    add_bound("corollary1_constant_moments", gap, 1e-10);
  } else {
    add("corollary1_constant_moments", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: constant curvature");
  }

  // G(lambda) = (n-2) lambda + o(lambda) > 0 for small lambda.
  {
    double thresh = 0.5 * std::pow(prm.n / K.sup_norm(), 1.0 / (prm.p - 1.0));
    GluingResult g = gluing_value(1e-3 * thresh, K, prm, opts);
    bool ok = g.ok() && g.G > 0.0;
    add("small_lambda_sign", ok ? CheckStatus::Pass : CheckStatus::Fail,
        g.ok() ? std::optional<double>(g.G) : std::nullopt, std::nullopt,
        "G at lambda = 1e-3 * threshold");
  }

  // Computed G matches the closed form derived from the bubble.
  if (constant_K) {
    double worst = 0.0;
    SolverOptions tight = opts;
    tight.rel_tol = std::min(opts.rel_tol, 1e-11);
    for (double lam : detail::logspace(0.05, 20.0, 50)) {
      GluingResult g = gluing_value(lam, K, prm, tight);
      if (!g.ok()) {
        worst = 1e300;
        break;
      }
      worst = std::max(worst,
                       std::abs(g.G - detail::symbolic_gluing(lam, K0, prm)));
    }
    add_bound("symbolic_gluing_identity", worst, 1e-8);
  } else {
    add("symbolic_gluing_identity", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: constant curvature");
  }

  // Root of G plus the three-part certificate of the glued global solution.
  std::optional<double> root;
  {
    GluingScan scan = scan_gluing(K, prm, cfg.scan.grid(), opts);
    if (scan.roots.empty()) {
      add("gluing_root_certificate", CheckStatus::Info, std::nullopt,
          std::nullopt, "no sign-change bracket in the scan range");
    } else {
      root = scan.roots.front();
      Trajectory traj = integrate(*root, K, prm, opts);
      GluingResult g = gluing_value(*root, K, prm, opts);
      GlobalSolution sol = kelvin_extend(traj, K, prm);
      double residual = global_residual(sol, {1.5, 2.0, 5.0, 10.0, 100.0});
      double jump = std::abs(derivative_jump(sol));
      double decay = std::abs(sol.eval(1e3).v * std::pow(1e3, prm.n - 2.0) -
                              *root) /
                     *root;
      bool ok = traj.positive() && g.ok() && std::abs(g.G) < 1e-8 &&
                residual < (constant_K ? 1e-6 : 1e-5) && jump < 1e-8 &&
                decay < 1e-3;
      add("gluing_root_certificate", ok ? CheckStatus::Pass : CheckStatus::Fail,
          residual, constant_K ? 1e-6 : 1e-5,
          "lambda1 = " + std::to_string(*root) + ", |G| = " +
              std::to_string(std::abs(g.G)) + ", jump = " +
              std::to_string(jump) + ", decay gap = " + std::to_string(decay));
    }
  }

  // At the root the bubble scaling lambda1^(2 beta) K0 / (n(n-2)) = 1.
  if (constant_K && root) {
    double scaling =
        std::pow(*root, 2.0 * prm.beta) * K0 / (prm.n * (prm.n - 2.0));
    add_bound("root_scaling_consistency", std::abs(scaling - 1.0), 1e-6);
  } else if (constant_K) {
    add("root_scaling_consistency", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "no root located");
  } else {
    add("root_scaling_consistency", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: constant curvature");
  }

  // Applying the reflection twice returns the inner solution exactly.
  {
    double lam = root ? *root
                      : 0.4 * std::pow(prm.n / K.sup_norm(),
                                       1.0 / (prm.p - 1.0));
    Trajectory traj = integrate(lam, K, prm, opts);
    if (traj.completed() && traj.positive() && K.symmetrized()) {
      GlobalSolution sol = kelvin_extend(traj, K, prm);
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        double s = rng.uniform(0.05, 0.999);
        double vin = traj.eval(s).v;
        double back = std::pow(s, 2.0 - prm.n) * sol.eval(1.0 / s).v;
        worst = std::max(worst, std::abs(back - vin) / std::abs(vin));
      }
      add_bound("kelvin_involution", worst, 1e-13);
    } else {
      add("kelvin_involution", CheckStatus::Skipped, std::nullopt,
          std::nullopt, "no positive complete trajectory available");
    }
  }

  // Large-lambda ratio diagnostics (requires K smooth at 0). T(1) must
  // settle (consecutive differences shrink), sit within 0.05 of 1 at the top
  // height, the log-derivative within 0.1 of 2-n, and G stay negative past
  // its first sign change. Note T(1) converges but, for perturbed profiles,
  // to a nearby constant rather than to 1 exactly; the windows cover that.
  if (K.smooth_at_zero()) {
    std::vector<double> lams{10.0, 1e2, 1e3, 1e4};
    auto diags = ratio_diagnostics(lams, K, prm, opts);
    bool all_ok = true;
    for (const auto& d : diags) all_ok = all_ok && d.status == SampleStatus::Ok;
    if (!all_ok) {
      add("lemma3_ratio_diagnostics", CheckStatus::Fail, std::nullopt,
          std::nullopt, "trajectory failed on the diagnostic grid");
    } else {
      double first_diff = std::abs(diags[1].T1 - diags[0].T1);
      double last_diff = std::abs(diags[3].T1 - diags[2].T1);
      bool settled = last_diff <= first_diff + 1e-3;
      bool negative_tail = true;
      bool seen_negative = false;
      for (const auto& d : diags) {
        if (d.G < 0.0) seen_negative = true;
        if (seen_negative && d.G >= 0.0) negative_tail = false;
      }
      const auto& last = diags.back();
      bool ok = settled && std::abs(last.T1 - 1.0) < 0.05 &&
                std::abs(last.logderiv_v - (2.0 - prm.n)) < 0.1 &&
                seen_negative && negative_tail;
      std::string seq = "T(1) over the grid:";
      for (const auto& d : diags) seq += " " + std::to_string(d.T1);
      add("lemma3_ratio_diagnostics",
          ok ? CheckStatus::Pass : CheckStatus::Fail,
          std::abs(last.T1 - 1.0), 0.05, seq);
    }
  } else {
    add("lemma3_ratio_diagnostics", CheckStatus::Skipped, std::nullopt,
        std::nullopt, "hypothesis: K smooth at 0 (closed families only)");
  }

  // Large-lambda gluing asymptotic. The computed G is checked against the
  // closed form, and for the n = 4, K = 8 normalization also against the
  // stated limit window around -2.
  if (constant_K) {
    SolverOptions tight = opts;
    tight.rel_tol = std::min(opts.rel_tol, 1e-11);
    GluingResult g = gluing_value(100.0, K, prm, tight);
    if (!g.ok()) {
      add("large_lambda_asymptotic", CheckStatus::Fail, std::nullopt,
          std::nullopt, "trajectory failed at lambda = 100");
    } else {
      double sym = detail::symbolic_gluing(100.0, K0, prm);
      add_bound("large_lambda_vs_symbolic", std::abs(g.G - sym), 1e-8);
      double limit = 100.0 * large_lambda_G_prediction(K0, prm, 100.0);
      double gap = std::abs(100.0 * g.G - limit);
      if (prm.n == 4 && K0 == 8.0) {
        add_bound("large_lambda_limit", gap, 5e-4,
                  "lambda*G at lambda = 100 against the limit " +
                      std::to_string(limit));
      } else {
        add("large_lambda_limit", CheckStatus::Info, gap, std::nullopt,
            "lambda*G at lambda = 100 vs limit " + std::to_string(limit) +
                "; asserted only for n = 4, K = 8");
      }
    }
  } else {
    add("large_lambda_limit", CheckStatus::Info, std::nullopt, std::nullopt,
        "prediction reported only; closed only for constant curvature");
  }

  // Existence thresholds: reported, never asserted (no finite computation
  // certifies infinity).
  {
    ThresholdEstimate l0 = estimate_lambda0(K, prm, opts, 1e3);
    std::string txt =
        l0.kind == ThresholdEstimate::Kind::Bounded
            ? "lambda0 ~ " + std::to_string(l0.value)
            : "lambda0 >= " + std::to_string(l0.probe_hi) + " (cap)";
    add("lambda0_estimate", CheckStatus::Info,
        l0.kind == ThresholdEstimate::Kind::Bounded
            ? std::optional<double>(l0.value)
            : std::nullopt,
        std::nullopt, txt);
    ThresholdEstimate li = estimate_lambda_inf(K, prm, opts, 1e3);
    std::string txt2;
    switch (li.kind) {
      case ThresholdEstimate::Kind::Bounded:
        txt2 = "lambda_inf ~ " + std::to_string(li.value);
        break;
      case ThresholdEstimate::Kind::NotBracketed:
        txt2 = "predicate fails at the cap; boundary not bracketed";
        break;
      default:
        txt2 = "all probed lambda exist";
        break;
    }
    add("lambda_inf_estimate", CheckStatus::Info,
        li.kind == ThresholdEstimate::Kind::Bounded
            ? std::optional<double>(li.value)
            : std::nullopt,
        std::nullopt, txt2);
  }

  rep.notes.push_back(
      "the large-lambda statement of the smooth-profile lemma carries a sign "
      "typo; the diagnostics test its proof's conclusion, G < 0 for large "
      "lambda");
  return rep;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_VERIFY_HPP
