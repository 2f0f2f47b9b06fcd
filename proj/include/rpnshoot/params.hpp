#ifndef RPNSHOOT_PARAMS_HPP
#define RPNSHOOT_PARAMS_HPP

#include <cmath>

#include "rpnshoot/errors.hpp"

namespace rpnshoot {

/// Dimension n >= 3 together with the derived exponents:
/// p = (n+2)/(n-2) (critical power) and beta = 2/(n-2) = (p-1)/2.
struct ProblemParams {
  int n;
  double p;
  double beta;
};

inline ProblemParams make_params(int n) {
  if (n < 3) {
    throw dimension_error("dimension must satisfy n >= 3, got n = " +
                          std::to_string(n));
  }
  ProblemParams prm;
  prm.n = n;
  prm.p = static_cast<double>(n + 2) / static_cast<double>(n - 2);
  prm.beta = 2.0 / static_cast<double>(n - 2);
  return prm;
}

/// sgn(v)*|v|^p, the odd extension of the power map. Defined for all v.
inline double signed_power(double v, double p) {
  if (v == 0.0) return 0.0;
  return v > 0.0 ? std::pow(v, p) : -std::pow(-v, p);
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_PARAMS_HPP
