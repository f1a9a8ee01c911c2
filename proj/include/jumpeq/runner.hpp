#pragma once

// Batch entry points shared by the shared-library ABI and the command line:
// solve all agents at a fixed price-impact field, run the equilibrium fixed
// point, and verify an emitted equilibrium by Monte Carlo.  Each returns a
// process exit code and reports results through files plus a key-value
// summary map, never by printing.

#include <map>
#include <string>

#include "jumpeq/config.hpp"

namespace jumpeq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitNotConverged = 4;
inline constexpr int kExitStatistical = 5;

// numeric results keyed by stable names ("iterations", "clearing_residual", ...)
using SummaryMap = std::map<std::string, double>;

// Solves every agent at lambda = 0 and writes lambda.csv plus
// agent_<i>_{u,u_x,pi}.csv into config.out_dir.
int run_solve(const RunConfig& config, SummaryMap* summary, std::string* error);

// Runs the damped fixed-point iteration and writes lambda_star.csv, per-agent
// fields, iterations.csv, and summary.json.  Exit 4 when not converged.
int run_equilibrate(const RunConfig& config, SummaryMap* summary, std::string* error);

// Monte Carlo verification of the artifacts under result_dir (normally the
// out_dir of a previous equilibrate run with the same model): HJB value
// identity, perturbation optimality, clearing along paths, the riskless
// bookkeeping identity, and jump statistics.  Writes verify_report.json and
// paths.csv into config.out_dir.  Exit 5 when any check fails.
int run_verify(const RunConfig& config, const std::string& result_dir, SummaryMap* summary,
               std::string* error);

}  // namespace jumpeq
