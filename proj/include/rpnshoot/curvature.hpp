#ifndef RPNSHOOT_CURVATURE_HPP
#define RPNSHOOT_CURVATURE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rpnshoot/errors.hpp"

namespace rpnshoot {

/// Radial curvature function K on [0,1], optionally extended to r > 1 by
/// K(r) = K(1/r). Required to be continuous with K(0) > 0 and K >= 0.
///
/// Three families are supported:
///   Constant           K(r) = K0
///   PowerPerturbation  K(r) = K0 + K_rho * r^rho, rho > 0
///   Tabulated          monotone cubic through non-negative knot values
class CurvatureProfile {
 public:
  struct Constant {
    double K0;
  };
  struct PowerPerturbation {
    double K0;
    double K_rho;
    double rho;
  };
  struct Tabulated {
    std::vector<double> knots;   // ascending, first 0, last 1
    std::vector<double> values;  // same length, >= 0, values[0] > 0
    std::vector<double> slopes;  // Fritsch-Carlson limited derivatives
  };

  static CurvatureProfile constant(double K0, bool symmetrized = true) {
    if (!(K0 > 0.0)) {
      throw curvature_error("constant profile requires K0 > 0");
    }
    return CurvatureProfile(Constant{K0}, symmetrized);
  }

  static CurvatureProfile power(double K0, double K_rho, double rho,
                                bool symmetrized = true) {
    if (!(K0 > 0.0)) {
      throw curvature_error("power profile requires K(0) = K0 > 0");
    }
    if (!(rho > 0.0)) {
      throw curvature_error("power profile requires rho > 0");
    }
    // K is monotone in r, so the minimum on [0,1] sits at an endpoint.
    if (K0 + K_rho < 0.0) {
      throw curvature_error("power profile is negative at r = 1");
    }
    return CurvatureProfile(PowerPerturbation{K0, K_rho, rho}, symmetrized);
  }

  static CurvatureProfile tabulated(std::vector<double> knots,
                                    std::vector<double> values,
                                    bool symmetrized = true) {
    if (knots.size() != values.size() || knots.size() < 2) {
      throw curvature_error("tabulated profile needs matching knot/value "
                            "arrays with at least two entries");
    }
    if (knots.front() != 0.0 || knots.back() != 1.0) {
      throw curvature_error("tabulated knots must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1])) {
        throw curvature_error("tabulated knots must be strictly ascending");
      }
    }
    if (!(values.front() > 0.0)) {
      throw curvature_error("tabulated profile requires K(0) > 0");
    }
    for (double v : values) {
      if (!(v >= 0.0)) {
        throw curvature_error("tabulated profile values must be >= 0");
      }
    }
    Tabulated tab{std::move(knots), std::move(values), {}};
    tab.slopes = fritsch_carlson_slopes(tab.knots, tab.values);
    CurvatureProfile prof(std::move(tab), symmetrized);
    // The limited cubic cannot undershoot the knot range, but certify
    // non-negativity by dense sampling as well.
    constexpr int kSamples = 10000;
    for (int i = 0; i <= kSamples; ++i) {
      double r = static_cast<double>(i) / kSamples;
      if (prof.eval(r) < 0.0) {
        throw curvature_error("tabulated profile interpolates below zero");
      }
    }
    return prof;
  }

  bool symmetrized() const { return symmetrized_; }

  bool is_constant() const {
    return std::holds_alternative<Constant>(family_);
  }
  bool is_tabulated() const {
    return std::holds_alternative<Tabulated>(family_);
  }

  /// K(r). For symmetrized profiles and r > 1 this evaluates K(1/r) through
  /// the same code path, so the symmetrization identity is exact.
  double eval(double r) const {
    if (!(r >= 0.0)) {
      throw curvature_error("curvature evaluated at negative radius");
    }
    if (r > 1.0) {
      if (!symmetrized_) {
        throw curvature_error(
            "curvature profile is not symmetrized; r > 1 is outside its "
            "domain");
      }
      r = 1.0 / r;
    }
    if (const auto* c = std::get_if<Constant>(&family_)) {
      return c->K0;
    }
    if (const auto* pw = std::get_if<PowerPerturbation>(&family_)) {
      return pw->K0 + pw->K_rho * std::pow(r, pw->rho);
    }
    return eval_tabulated(std::get<Tabulated>(family_), r);
  }

  double at_zero() const { return eval(0.0); }

  /// sup of K over [0,1]; exact for the closed families (K monotone),
  /// a 10^4-point grid maximum for tabulated data.
  double sup_norm() const {
    if (const auto* c = std::get_if<Constant>(&family_)) {
      return c->K0;
    }
    if (const auto* pw = std::get_if<PowerPerturbation>(&family_)) {
      return std::max(pw->K0, pw->K0 + pw->K_rho);
    }
    constexpr int kSamples = 10000;
    double m = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      m = std::max(m, eval(static_cast<double>(i) / kSamples));
    }
    return m;
  }

  /// Coefficient of r^2 in the expansion of K at 0, when K is twice
  /// differentiable there: 0 for constant K, K_rho when rho = 2, 0 when
  /// rho > 2. nullopt signals "not C^2 at 0" (rho < 2, or tabulated data),
  /// in which case callers shrink the series handoff radius instead.
  std::optional<double> second_taylor_coeff() const {
    if (std::holds_alternative<Constant>(family_)) return 0.0;
    if (const auto* pw = std::get_if<PowerPerturbation>(&family_)) {
      if (pw->rho == 2.0) return pw->K_rho;
      if (pw->rho > 2.0) return 0.0;
      return std::nullopt;
    }
    return std::nullopt;
  }

  /// Smooth in a neighbourhood of 0 (closed families only); gates the
  /// large-lambda ratio diagnostics.
  bool smooth_at_zero() const { return !is_tabulated(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    if (const auto* c = std::get_if<Constant>(&family_)) {
      j["family"] = "constant";
      j["K0"] = c->K0;
    } else if (const auto* pw = std::get_if<PowerPerturbation>(&family_)) {
      j["family"] = "power";
      j["K0"] = pw->K0;
      j["K_rho"] = pw->K_rho;
      j["rho"] = pw->rho;
    } else {
      const auto& tab = std::get<Tabulated>(family_);
      j["family"] = "table";
      j["knots"] = tab.knots;
      j["values"] = tab.values;
    }
    j["symmetrized"] = symmetrized_;
    return j;
  }

  /// Strict parse: the key set must match the family exactly.
  static CurvatureProfile from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
      throw config_error("curvature profile must be a JSON object");
    }
    std::string family = require<std::string>(j, "family");
    bool symmetrized = j.contains("symmetrized")
                           ? require<bool>(j, "symmetrized")
                           : true;
    if (family == "constant") {
      reject_unknown(j, {"family", "K0", "symmetrized"});
      return constant(require<double>(j, "K0"), symmetrized);
    }
    if (family == "power") {
      reject_unknown(j, {"family", "K0", "K_rho", "rho", "symmetrized"});
      return power(require<double>(j, "K0"), require<double>(j, "K_rho"),
                   require<double>(j, "rho"), symmetrized);
    }
    if (family == "table") {
      reject_unknown(j, {"family", "knots", "values", "symmetrized"});
      return tabulated(require<std::vector<double>>(j, "knots"),
                       require<std::vector<double>>(j, "values"),
                       symmetrized);
    }
    throw config_error("unknown curvature family \"" + family + "\"");
  }

 private:
  using Family = std::variant<Constant, PowerPerturbation, Tabulated>;

  CurvatureProfile(Family family, bool symmetrized)
      : family_(std::move(family)), symmetrized_(symmetrized) {}

  static std::vector<double> fritsch_carlson_slopes(
      const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        m[i] = 0.0;  // local extremum: flat tangent, no overshoot
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // Limit endpoint and interior slopes to the monotone region.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (delta[i] == 0.0) {
        m[i] = 0.0;
        m[i + 1] = 0.0;
        continue;
      }
      double a = m[i] / delta[i];
      double b = m[i + 1] / delta[i];
      if (a < 0.0) m[i] = 0.0;
      if (b < 0.0) m[i + 1] = 0.0;
      double s = a * a + b * b;
      if (s > 9.0) {
        double t = 3.0 / std::sqrt(s);
        m[i] = t * a * delta[i];
        m[i + 1] = t * b * delta[i];
      }
    }
    return m;
  }

  static double eval_tabulated(const Tabulated& tab, double r) {
    const auto& x = tab.knots;
    const auto& y = tab.values;
    const auto& m = tab.slopes;
    auto it = std::upper_bound(x.begin(), x.end(), r);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i + 1 >= x.size()) i = x.size() - 2;
    double h = x[i + 1] - x[i];
    double t = (r - x[i]) / h;
    double t2 = t * t;
    double t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
  }

  template <typename T>
  static T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) {
      throw config_error("curvature profile is missing \"" + key + "\"");
    }
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw config_error("curvature field \"" + key + "\" has the wrong type");
    }
  }

  static void reject_unknown(const nlohmann::json& j,
                             std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : allowed) {
        if (item.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) {
        throw config_error("unknown curvature field \"" + item.key() + "\"");
      }
    }
  }

  Family family_;
  bool symmetrized_;
};

}  // namespace rpnshoot

#endif  // RPNSHOOT_CURVATURE_HPP
