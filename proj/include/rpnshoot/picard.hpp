#ifndef RPNSHOOT_PICARD_HPP
#define RPNSHOOT_PICARD_HPP

#include <cmath>
#include <vector>

#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/params.hpp"

namespace rpnshoot {

/// Fixed-point iterates of the integral form of the IVP on a uniform grid,
///
///   v_{k+1}(r) = lambda - int_0^r s^(1-n) int_0^s t^(n-1) v_k^p K dt ds
///   v'(r)      = -r^(1-n) int_0^r t^(n-1) v^p K dt
///
/// with composite trapezoid quadrature. Deliberately shares nothing with the
/// Runge-Kutta path so the two can cross-check each other. Converges for
/// small lambda * r_end by contraction.
struct PicardTable {
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> dv;
};

inline PicardTable picard_oracle(double lambda, const CurvatureProfile& K,
                                 const ProblemParams& prm, double r_end,
                                 int iterations, int grid_size) {
  if (!(r_end > 0.0) || r_end > 1.0) {
    throw solver_error("picard oracle requires 0 < r_end <= 1");
  }
  if (grid_size < 1000) {
    throw solver_error("picard oracle requires grid_size >= 1000");
  }
  if (iterations < 0) {
    throw solver_error("picard oracle requires a non-negative iteration count");
  }

  const int n_pts = grid_size + 1;
  const double h = r_end / grid_size;
  const double divergence_bound = 2.0 * lambda * 1e3;

  PicardTable tab;
  tab.r.resize(n_pts);
  tab.v.assign(n_pts, lambda);
  tab.dv.assign(n_pts, 0.0);
  std::vector<double> kr(n_pts), rn(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    tab.r[i] = i * h;
    kr[i] = K.eval(tab.r[i]);
    rn[i] = std::pow(tab.r[i], prm.n - 1.0);
  }

  std::vector<double> f(n_pts), inner(n_pts), g(n_pts), outer(n_pts);
  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < n_pts; ++i) {
      f[i] = rn[i] * kr[i] * signed_power(tab.v[i], prm.p);
    }
    inner[0] = 0.0;
    for (int i = 1; i < n_pts; ++i) {
      inner[i] = inner[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    }
    g[0] = 0.0;  // s^(1-n) * inner(s) -> 0 as s -> 0
    for (int i = 1; i < n_pts; ++i) {
      g[i] = inner[i] / rn[i];
    }
    outer[0] = 0.0;
    for (int i = 1; i < n_pts; ++i) {
      outer[i] = outer[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
    }
    double vmax = 0.0;
    for (int i = 0; i < n_pts; ++i) {
      tab.v[i] = lambda - outer[i];
      vmax = std::max(vmax, std::abs(tab.v[i]));
      tab.dv[i] = -g[i];
    }
    if (vmax > divergence_bound) {
      throw oracle_divergence_error(
          "picard iteration diverged (iterate exceeded 2e3 * lambda)");
    }
  }
  return tab;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_PICARD_HPP
