#ifndef RPNSHOOT_CLI_HPP
#define RPNSHOOT_CLI_HPP

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rpnshoot/config.hpp"
#include "rpnshoot/gluing.hpp"
#include "rpnshoot/io.hpp"
#include "rpnshoot/kelvin.hpp"
#include "rpnshoot/verify.hpp"

namespace rpnshoot {

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoBracket = 2;

// Certificate thresholds for `solve`.
inline constexpr double kCertGlueTol = 1e-8;
inline constexpr double kCertResidualTol = 1e-5;
inline const std::vector<double> kCertResidualSamples{1.5, 2.0, 5.0, 10.0,
                                                      100.0};

namespace detail {

inline std::string artifact_path(const RunConfig& cfg,
                                 const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

}  // namespace detail

/// scan -> bracket -> root -> Kelvin extension -> residual certificate.
/// Writes scan.csv, root.json and solution.csv. Exit 0 on a certified root,
/// 2 when the scan shows no sign change, 1 on errors.
inline int run_solve(const RunConfig& cfg, int jobs = 1,
                     std::ostream& log = std::cout) {
  try {
    ProblemParams prm = make_params(cfg.n);
    CurvatureProfile K = cfg.profile();
    GluingScan scan = scan_gluing(K, prm, cfg.scan.grid(), cfg.solver, jobs);
    write_file(detail::artifact_path(cfg, "scan.csv"), scan_csv(scan));
    if (scan.roots.empty()) {
      log << "no sign change of G in the scan range [" << cfg.scan.lambda_min
          << ", " << cfg.scan.lambda_max
          << "]; widen it with --lambda-min/--lambda-max\n";
      return kExitNoBracket;
    }
    double lambda1 = scan.roots.front();
    Trajectory traj = integrate(lambda1, K, prm, cfg.solver);
    GluingResult g = gluing_value(lambda1, K, prm, cfg.solver);
    GlobalSolution sol = kelvin_extend(traj, K, prm);

    RootCertificate cert;
    cert.lambda1 = lambda1;
    cert.G_at_root = g.ok() ? g.G : std::nan("");
    cert.positive = traj.positive();
    cert.residual_max = global_residual(sol, kCertResidualSamples);
    cert.jump = derivative_jump(sol);
    write_file(detail::artifact_path(cfg, "root.json"),
               root_report(cert).dump(2) + "\n");
    write_file(detail::artifact_path(cfg, "solution.csv"), global_csv(sol));

    bool certified = cert.positive && g.ok() &&
                     std::abs(cert.G_at_root) < kCertGlueTol &&
                     cert.residual_max < kCertResidualTol;
    log << "lambda1 = " << format_double(lambda1)
        << ", |G| = " << format_double(std::abs(cert.G_at_root))
        << ", residual_max = " << format_double(cert.residual_max)
        << (certified ? " (certified)" : " (certificate FAILED)") << "\n";
    return certified ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

/// Evaluate G over the configured grid and write scan.csv. Per-sample
/// failures are rows with status != ok, not errors.
inline int run_scan(const RunConfig& cfg, int jobs = 1,
                    std::ostream& log = std::cout) {
  try {
    ProblemParams prm = make_params(cfg.n);
    CurvatureProfile K = cfg.profile();
    GluingScan scan = scan_gluing(K, prm, cfg.scan.grid(), cfg.solver, jobs);
    write_file(detail::artifact_path(cfg, "scan.csv"), scan_csv(scan));
    log << scan.samples.size() << " samples, " << scan.bracket_pairs.size()
        << " sign-change bracket(s), " << scan.roots.size() << " root(s)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

/// Run the invariant suite for the configured (n, K) and write report.json.
/// Exit 0 iff every applicable check passes.
inline int run_verify(const RunConfig& cfg, std::ostream& log = std::cout) {
  try {
    VerifyReport rep = run_verification(cfg);
    write_file(detail::artifact_path(cfg, "report.json"),
               rep.to_json().dump(2) + "\n");
    for (const auto& c : rep.checks) {
      log << "[" << to_string(c.status) << "] " << c.name;
      if (c.measured) log << "  measured=" << format_double(*c.measured);
      if (c.tolerance) log << "  tolerance=" << format_double(*c.tolerance);
      if (!c.detail.empty()) log << "  (" << c.detail << ")";
      log << "\n";
    }
    return rep.all_passed() ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_CLI_HPP
