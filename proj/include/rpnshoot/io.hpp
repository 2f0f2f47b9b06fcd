#ifndef RPNSHOOT_IO_HPP
#define RPNSHOOT_IO_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/gluing.hpp"
#include "rpnshoot/kelvin.hpp"
#include "rpnshoot/solver.hpp"

namespace rpnshoot {

/// Shortest decimal representation that round-trips to the same double, so
/// CSV artifacts are diff-stable and lossless.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw solver_error("cannot open " + path + " for writing");
  }
  out << body;
}

/// `r,v,dv` on a uniform grid over the covered range, via the dense output.
inline std::string trajectory_csv(const Trajectory& traj, int points = 201) {
  std::string body = "r,v,dv\n";
  double hi = traj.coverage_end();
  for (int i = 0; i < points; ++i) {
    double r = hi * i / (points - 1);
    TrajState s = traj.eval(r);
    body += format_double(r) + "," + format_double(s.v) + "," +
            format_double(s.dv) + "\n";
  }
  return body;
}

inline nlohmann::json trajectory_summary(const Trajectory& traj) {
  nlohmann::json j;
  j["lambda"] = traj.lambda;
  j["status"] = to_string(traj.status);
  if (traj.r_star) j["r_star"] = *traj.r_star;
  if (traj.completed()) {
    TrajState end = traj.at_end();
    j["v1"] = end.v;
    j["dv1"] = end.dv;
  }
  return j;
}

/// `lambda,G,status`; failed samples keep their status and an empty G cell.
inline std::string scan_csv(const GluingScan& scan) {
  std::string body = "lambda,G,status\n";
  for (const GluingResult& s : scan.samples) {
    body += format_double(s.lambda) + ",";
    if (s.ok()) body += format_double(s.G);
    body += ",";
    body += to_string(s.status);
    body += "\n";
  }
  return body;
}

/// `r,v,dv` of a global solution: r = 0, then a log-spaced grid up to r_max.
inline std::string global_csv(const GlobalSolution& sol, double r_max = 1e3,
                              int points = 601, double r_min = 1e-3) {
  std::string body = "r,v,dv\n";
  {
    TrajState s = sol.eval(0.0);
    body += "0," + format_double(s.v) + "," + format_double(s.dv) + "\n";
  }
  for (int i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / (points - 1);
    double r = r_min * std::pow(r_max / r_min, t);
    TrajState s = sol.eval(r);
    body += format_double(r) + "," + format_double(s.v) + "," +
            format_double(s.dv) + "\n";
  }
  return body;
}

struct RootCertificate {
  double lambda1;
  double G_at_root;
  bool positive;
  double residual_max;
  double jump;
};

inline nlohmann::json root_report(const RootCertificate& cert) {
  nlohmann::json j;
  j["lambda1"] = cert.lambda1;
  j["G_at_root"] = cert.G_at_root;
  j["certificate"]["positive"] = cert.positive;
  j["certificate"]["residual_max"] = cert.residual_max;
  j["certificate"]["derivative_jump"] = cert.jump;
  return j;
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_IO_HPP
