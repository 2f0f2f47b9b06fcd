#ifndef RPNSHOOT_SOLVER_HPP
#define RPNSHOOT_SOLVER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/params.hpp"

namespace rpnshoot {

// The radial equation v'' + (n-1)/r v' + K(r) v^p = 0 is integrated as the
// first-order system in (v, w) with w = r^(n-1) v':
//
//   v' = w / r^(n-1)
//   w' = -K(r) r^(n-1) sgn(v)|v|^p
//
// which is an exact reformulation and keeps the right-hand side free of the
// singular 1/r coefficient. The leg [0, r_start] is covered by a quartic
// series start; the rest by an adaptive Dormand-Prince 5(4) pair with dense
// output.

struct SolverOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Series handoff radius; when unset an adaptive default is used that
  /// keeps the neglected series term uniformly small in lambda and K(0).
  std::optional<double> r_start;
  /// |v| bound that flags blow-up; defaults to 1e8 * lambda.
  std::optional<double> blowup_threshold;
  double zero_tol = 1e-13;
  long max_steps = 1000000;
  /// Keep integrating after v crosses zero (the first crossing is still
  /// recorded); used by the existence-threshold diagnostics.
  bool continue_past_zero = false;
  /// Radii in (r_start, 1] the stepper must land on exactly. Values at these
  /// radii then share one smoothly accumulated error, which matters when
  /// they feed finite differences.
  std::vector<double> forced_outputs;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(zero_tol > 0.0)) {
      throw solver_error("solver tolerances must be positive");
    }
    if (r_start && !(*r_start > 0.0 && *r_start < 1.0)) {
      throw solver_error("r_start must lie in (0, 1)");
    }
    if (blowup_threshold && !(*blowup_threshold > 0.0)) {
      throw solver_error("blowup threshold must be positive");
    }
    if (max_steps < 1) {
      throw solver_error("max_steps must be at least 1");
    }
  }
};

enum class TrajectoryStatus { Completed, HitZero, BlowUp };

inline const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::HitZero: return "hitzero";
    case TrajectoryStatus::BlowUp: return "blowup";
  }
  return "unknown";
}

struct TrajState {
  double v;
  double dv;
};

/// Dense numerical solution of the shot IVP on [0, min(1, r_stop)].
class Trajectory {
 public:
  struct DenseSegment {
    double r0;
    double h;          // full step length the coefficients were built for
    double h_covered;  // may be shorter when an event truncated the step
    std::array<double, 5> cv;
    std::array<double, 5> cw;
  };

  std::vector<double> r_grid;
  std::vector<double> v;
  std::vector<double> dv;
  double lambda = 0.0;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  std::optional<double> r_star;  // refined zero / blow-up radius
  ProblemParams params{};
  SolverOptions opts;

  double series_radius = 0.0;
  double series_a2 = 0.0;
  double series_a4 = 0.0;
  std::vector<DenseSegment> segments;

  double coverage_end() const { return r_grid.back(); }

  bool completed() const { return status == TrajectoryStatus::Completed; }

  bool positive() const {
    for (double x : v) {
      if (!(x > 0.0)) return false;
    }
    return true;
  }

  /// Interpolated (v, v') anywhere in [0, coverage_end].
  TrajState eval(double r) const {
    if (!(r >= 0.0) || r > coverage_end() * (1.0 + 1e-14)) {
      throw solver_error("trajectory evaluated outside its covered range");
    }
    r = std::min(r, coverage_end());
    if (r <= series_radius) {
      double r2 = r * r;
      return {lambda + series_a2 * r2 + series_a4 * r2 * r2,
              2.0 * series_a2 * r + 4.0 * series_a4 * r2 * r};
    }
    auto it = std::upper_bound(
        segments.begin(), segments.end(), r,
        [](double x, const DenseSegment& s) { return x < s.r0; });
    const DenseSegment& seg = it == segments.begin() ? segments.front() : *(it - 1);
    double theta = (r - seg.r0) / seg.h;
    double theta1 = 1.0 - theta;
    auto horner = [&](const std::array<double, 5>& c) {
      return c[0] + theta * (c[1] + theta1 * (c[2] + theta * (c[3] + theta1 * c[4])));
    };
    double vr = horner(seg.cv);
    double wr = horner(seg.cw);
    return {vr, wr / std::pow(r, params.n - 1.0)};
  }

  TrajState at_end() const { return {v.back(), dv.back()}; }
};

/// Adaptive default for the series handoff radius. The solution's natural
/// length scale is (lambda^beta sqrt(K0/(n(n-2))))^(-1); the handoff sits at
/// 1e-2 of it (capped at 1e-4) so the neglected r^6 term stays below ~1e-12
/// relative for every lambda. Profiles that are not C^2 at 0 get a further
/// factor 10 shrink.
inline double default_r_start(double lambda, const CurvatureProfile& K,
                              const ProblemParams& prm) {
  double scale = std::sqrt(K.at_zero() / (prm.n * (prm.n - 2.0)));
  double r = std::min(1e-4, 1e-2 / (std::pow(lambda, prm.beta) *
                                    std::max(scale, 1.0)));
  if (!K.second_taylor_coeff()) r *= 0.1;
  return r;
}

/// Quartic series start: v, v' at r_start from the expansion
/// v = lambda + a2 r^2 + a4 r^4 with
///   a2 = -K(0) lambda^p / (2n)
///   a4 = [p K(0)^2 lambda^(2p-1)/(2n) - K2 lambda^p] / (4(n+2))
/// where K2 is the r^2 coefficient of K at 0 (taken as 0 when K is not
/// twice differentiable there, with the handoff radius shrunk accordingly).
inline std::pair<double, double> series_start(double lambda,
                                              const CurvatureProfile& K,
                                              const ProblemParams& prm,
                                              double r_start) {
  if (!(r_start > 0.0)) {
    throw start_error("series start requires r_start > 0");
  }
  double K0 = K.at_zero();
  double K2 = K.second_taylor_coeff().value_or(0.0);
  double lp = std::pow(lambda, prm.p);
  double a2 = -K0 * lp / (2.0 * prm.n);
  double a4 = (prm.p * K0 * K0 * std::pow(lambda, 2.0 * prm.p - 1.0) /
                   (2.0 * prm.n) -
               K2 * lp) /
              (4.0 * (prm.n + 2.0));
  if (!(std::abs(a2) * r_start * r_start < 1e-3 * lambda)) {
    throw start_error(
        "r_start is too large for the series start; the leading correction "
        "exceeds 1e-3 * lambda, choose a smaller handoff radius");
  }
  double r2 = r_start * r_start;
  double v = lambda + a2 * r2 + a4 * r2 * r2;
  double dv = 2.0 * a2 * r_start + 4.0 * a4 * r2 * r_start;
  return {v, dv};
}

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5,
                        kC5 = 8.0 / 9;
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                        kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                        kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                        kA65 = -5103.0 / 18656;
inline constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113,
                        kA74 = 125.0 / 192, kA75 = -2187.0 / 6784,
                        kA76 = 11.0 / 84;
// b - b*: weights of the embedded error estimate.
inline constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695,
                        kE4 = 71.0 / 1920, kE5 = -17253.0 / 339200,
                        kE6 = 22.0 / 525, kE7 = -1.0 / 40;
// Dense-output weights.
inline constexpr double kD1 = -12715105075.0 / 11282082432.0;
inline constexpr double kD3 = 87487479700.0 / 32700410799.0;
inline constexpr double kD4 = -10690763975.0 / 1880347072.0;
inline constexpr double kD5 = 701980252875.0 / 199316789632.0;
inline constexpr double kD6 = -1453857185.0 / 822651844.0;
inline constexpr double kD7 = 69997945.0 / 29380423.0;

struct Rhs {
  const CurvatureProfile& K;
  const ProblemParams& prm;

  std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const {
    double rn = std::pow(r, prm.n - 1.0);
    return {y[1] / rn, -K.eval(r) * rn * signed_power(y[0], prm.p)};
  }
};

}  // namespace detail

/// Integrate the shot IVP with initial height lambda from the series handoff
/// to r = 1, with zero-crossing and blow-up detection.
inline Trajectory integrate(double lambda, const CurvatureProfile& K,
                            const ProblemParams& prm,
                            const SolverOptions& opts = {}) {
  using detail::Rhs;
  opts.validate();
  if (!(lambda > 0.0)) {
    throw solver_error("initial height lambda must be positive");
  }

  Trajectory traj;
  traj.lambda = lambda;
  traj.params = prm;
  traj.opts = opts;

  const double r_end = 1.0;
  double r0 = opts.r_start ? *opts.r_start : default_r_start(lambda, K, prm);
  auto [v0, dv0] = series_start(lambda, K, prm, r0);
  traj.series_radius = r0;
  {
    double K0 = K.at_zero();
    double lp = std::pow(lambda, prm.p);
    traj.series_a2 = -K0 * lp / (2.0 * prm.n);
    traj.series_a4 = (prm.p * K0 * K0 * std::pow(lambda, 2.0 * prm.p - 1.0) /
                          (2.0 * prm.n) -
                      K.second_taylor_coeff().value_or(0.0) * lp) /
                     (4.0 * (prm.n + 2.0));
  }

  const double blowup = opts.blowup_threshold ? *opts.blowup_threshold
                                              : 1e8 * lambda;

  // Stops the stepper must land on exactly: forced outputs, then r = 1.
  std::vector<double> stops;
  for (double s : opts.forced_outputs) {
    if (s > r0 && s < r_end) stops.push_back(s);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(r_end);
  std::size_t next_stop = 0;

  Rhs rhs{K, prm};
  std::array<double, 2> y{v0, std::pow(r0, prm.n - 1.0) * dv0};
  double r = r0;
  std::array<double, 2> k1 = rhs(r, y);

  traj.r_grid.push_back(r);
  traj.v.push_back(y[0]);
  traj.dv.push_back(dv0);

  double h = 0.1 * r0;
  bool crossed = false;
  long steps = 0;

  auto record = [&](double rr, double vv, double ww) {
    traj.r_grid.push_back(rr);
    traj.v.push_back(vv);
    traj.dv.push_back(ww / std::pow(rr, prm.n - 1.0));
  };

  auto dense_at = [&](const Trajectory::DenseSegment& seg, double theta) {
    double theta1 = 1.0 - theta;
    auto horner = [&](const std::array<double, 5>& c) {
      return c[0] +
             theta * (c[1] + theta1 * (c[2] + theta * (c[3] + theta1 * c[4])));
    };
    return std::array<double, 2>{horner(seg.cv), horner(seg.cw)};
  };

  while (r < r_end) {
    if (++steps > opts.max_steps) {
      throw step_budget_error("step budget exhausted at r = " +
                              std::to_string(r));
    }
    while (next_stop + 1 < stops.size() && stops[next_stop] <= r) ++next_stop;
    double target = stops[next_stop];
    bool hit_target = false;
    if (r + h >= target - 1e-15 * target) {
      h = target - r;
      hit_target = true;
    }
    if (!(h > 0.0) || h < 1e-16 * r) {
      throw step_budget_error("step size underflow at r = " +
                              std::to_string(r));
    }

    using detail::kA21, detail::kA31, detail::kA32, detail::kA41,
        detail::kA42, detail::kA43, detail::kA51, detail::kA52, detail::kA53,
        detail::kA54, detail::kA61, detail::kA62, detail::kA63, detail::kA64,
        detail::kA65, detail::kA71, detail::kA73, detail::kA74, detail::kA75,
        detail::kA76, detail::kC2, detail::kC3, detail::kC4, detail::kC5,
        detail::kE1, detail::kE3, detail::kE4, detail::kE5, detail::kE6,
        detail::kE7;

    std::array<double, 2> k2, k3, k4, k5, k6, k7, y1, yt;
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * kA21 * k1[i];
    k2 = rhs(r + kC2 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    k3 = rhs(r + kC3 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    k4 = rhs(r + kC4 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                          kA54 * k4[i]);
    k5 = rhs(r + kC5 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                          kA64 * k4[i] + kA65 * k5[i]);
    k6 = rhs(r + h, yt);
    for (int i = 0; i < 2; ++i)
      y1[i] = y[i] + h * (kA71 * k1[i] + kA73 * k3[i] + kA74 * k4[i] +
                          kA75 * k5[i] + kA76 * k6[i]);
    k7 = rhs(r + h, y1);

    double rn_new = std::pow(r + h, prm.n - 1.0);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                      kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
      double floor_i = i == 0 ? opts.abs_tol : opts.abs_tol * rn_new;
      double sc = floor_i + opts.rel_tol * std::max(std::abs(y[i]),
                                                    std::abs(y1[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(0.5 * err);

    if (err > 1.0) {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      continue;
    }

    // Accepted: build the dense segment.
    Trajectory::DenseSegment seg;
    seg.r0 = r;
    seg.h = h;
    seg.h_covered = h;
    for (int i = 0; i < 2; ++i) {
      double ydiff = y1[i] - y[i];
      double bspl = h * k1[i] - ydiff;
      std::array<double, 5> c;
      c[0] = y[i];
      c[1] = ydiff;
      c[2] = bspl;
      c[3] = ydiff - h * k7[i] - bspl;
      c[4] = h * (detail::kD1 * k1[i] + detail::kD3 * k3[i] +
                  detail::kD4 * k4[i] + detail::kD5 * k5[i] +
                  detail::kD6 * k6[i] + detail::kD7 * k7[i]);
      if (i == 0) {
        seg.cv = c;
      } else {
        seg.cw = c;
      }
    }

    // Event checks on the accepted step.
    bool zero_event = !crossed && y[0] > 0.0 && y1[0] <= 0.0;
    bool blow_event = std::abs(y1[0]) >= blowup;
    if (zero_event || blow_event) {
      auto event_fn = [&](double theta) {
        double vv = dense_at(seg, theta)[0];
        return zero_event ? vv : std::abs(vv) - blowup;
      };
      double lo = 0.0, hi = 1.0;
      double f_lo = event_fn(lo);
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double f_mid = event_fn(mid);
        if (zero_event && std::abs(f_mid) <= opts.zero_tol) {
          lo = hi = mid;
          break;
        }
        if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-17) break;
      }
      double theta_star = 0.5 * (lo + hi);
      double r_star = r + theta_star * h;
      if (zero_event && opts.continue_past_zero) {
        crossed = true;
        traj.r_star = r_star;
        traj.status = TrajectoryStatus::HitZero;
      } else {
        seg.h_covered = theta_star * h;
        traj.segments.push_back(seg);
        auto ys = dense_at(seg, theta_star);
        record(r_star, ys[0], ys[1]);
        traj.r_star = r_star;
        traj.status = zero_event ? TrajectoryStatus::HitZero
                                 : TrajectoryStatus::BlowUp;
        return traj;
      }
    }

    traj.segments.push_back(seg);
    r = hit_target ? target : r + h;
    y = y1;
    k1 = k7;  // FSAL
    record(r, y[0], y[1]);

    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }

  if (!crossed) traj.status = TrajectoryStatus::Completed;
  return traj;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_SOLVER_HPP
