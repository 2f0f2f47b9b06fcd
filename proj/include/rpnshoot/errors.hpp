#ifndef RPNSHOOT_ERRORS_HPP
#define RPNSHOOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rpnshoot {

/// Base class for all library errors.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension n out of range (the exponents divide by n-2).
class dimension_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Profile construction or evaluation outside the valid domain.
class curvature_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Series handoff radius violates its smallness precondition.
class start_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Step budget exhausted before reaching the right endpoint.
class step_budget_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Picard iterates left the convergence ball.
class oracle_divergence_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class quadrature_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Root refinement hit an integrator failure inside the bracket.
class bracket_invalid_error : public solver_error {
 public:
  explicit bracket_invalid_error(const std::string& what, double lambda)
      : solver_error(what), failing_lambda(lambda) {}
  double failing_lambda;
};

/// Kelvin extension requires a completed, positive trajectory.
class extension_error : public solver_error {
 public:
  using solver_error::solver_error;
};

/// Run configuration rejected (schema violation, unknown key, bad value).
class config_error : public solver_error {
 public:
  using solver_error::solver_error;
};

}  // namespace rpnshoot

#endif  // RPNSHOOT_ERRORS_HPP
