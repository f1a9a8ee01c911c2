#pragma once

// Path simulation of the driving noise (Brownian motion plus one exponential
// jump time), Euler wealth dynamics under a Markov strategy, expected-utility
// estimation, and the statistical verification suite: optimality under
// common-random-number perturbations, market clearing along paths, the
// riskless bookkeeping identity, and jump-frequency statistics.

#include <cstdint>
#include <vector>

#include "jumpeq/agent_hjb.hpp"
#include "jumpeq/equilibrium.hpp"
#include "jumpeq/grid_field.hpp"

namespace jumpeq {

// key half that separates this stream family from other uses of the engine
inline constexpr std::uint64_t kStreamKey = 0x6A756D7065713031ULL;

struct SimConfig {
  std::int64_t n_paths = 100000;
  std::int64_t n_steps = 0;  // 0 means "use the PDE time grid"; resolved by config loading
  std::uint64_t seed = 0;
  double x0 = 0.0;
  void validate() const;
};

// Increments are Normal(0, dt); tau is exponential(mu), +infinity when the
// path never jumps.  N takes the pre-jump value 1{tau < t_m} at step starts
// and 1{tau <= T} at the terminal time.
struct PathBatch {
  double T = 0.0;
  double x0 = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t n_steps = 0;
  std::vector<double> increments;  // n_paths * n_steps, row-major by path
  std::vector<double> tau;         // n_paths

  double dt() const { return T / static_cast<double>(n_steps); }
  double increment(std::int64_t path, std::int64_t step) const {
    return increments[static_cast<std::size_t>(path * n_steps + step)];
  }
  int n_before(std::int64_t path, double t) const {
    return tau[static_cast<std::size_t>(path)] < t ? 1 : 0;
  }
  int n_terminal(std::int64_t path) const {
    return tau[static_cast<std::size_t>(path)] <= T ? 1 : 0;
  }
};

PathBatch simulate_paths(double mu, double T, const SimConfig& config);

struct UtilityEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct PathTerminal {
  double b_t = 0.0;
  int n_t = 0;
  double x_t = 0.0;      // terminal wealth from trading
  double utility = 0.0;  // U(x_t + g(b_t, n_t))
};

// Terminal state per path under the Euler scheme
// X_{m+1} = X_m + pi(t_m, B_m, N_{t_m-}) * (lambda(t_m, B_m, N_{t_m-}) dt + dB_m).
// Paths must step on the field time grid; strategy lookups then hit time
// nodes exactly and only interpolate in x.
std::vector<PathTerminal> terminal_summaries(const SlicedField& lambda,
                                             const SlicedField& strategy,
                                             const AgentSpec& agent, const PathBatch& paths);

// the utility column of terminal_summaries
std::vector<double> utility_samples(const SlicedField& lambda, const SlicedField& strategy,
                                    const AgentSpec& agent, const PathBatch& paths);

UtilityEstimate wealth_and_utility(const SlicedField& lambda, const SlicedField& strategy,
                                   const AgentSpec& agent, const PathBatch& paths);

UtilityEstimate estimate_from_samples(const std::vector<double>& samples);

struct PerturbationCheck {
  double perturbed_mean = 0.0;
  double diff_mean = 0.0;    // utility(pi*) - utility(pi* + eps*phi)
  double diff_stderr = 0.0;  // stderr of the per-path CRN difference
  double quad_coeff = 0.0;   // diff_mean / eps^2
  bool passed = false;       // diff_mean >= -3 * diff_stderr
};

struct OptimalityReport {
  double base_mean = 0.0;
  double base_stderr = 0.0;
  double eps = 0.0;
  std::vector<PerturbationCheck> checks;
  bool all_passed = true;
};

// Rationality check: each perturbed strategy pi* + eps*phi is scored on the
// SAME paths and must not beat pi* by more than 3 stderr of the per-path
// difference.  Statistical failures are reported, never thrown.
OptimalityReport verify_optimality(const AgentSolution& solution, const SlicedField& lambda,
                                   const AgentSpec& agent, const PathBatch& paths,
                                   const std::vector<SlicedField>& perturbations, double eps);

struct RisklessReport {
  double max_identity_error = 0.0;  // max |pi*S + rho - integral pi dS|
  double max_abs_rho = 0.0;
};

// rho_t = integral_0^t pi dS - pi_t * S_t along each path, same Euler grid;
// the bookkeeping identity pi*S + rho = integral pi dS is definitional and
// must hold to rounding.
RisklessReport riskless_position(const SlicedField& strategy, const SlicedField& lambda,
                                 const PathBatch& paths);

struct ClearingPathReport {
  double max_abs = 0.0;  // max |sum_i pi_i| over paths and step starts
};

ClearingPathReport verify_clearing_on_paths(const EquilibriumResult& result,
                                            const PathBatch& paths);

struct JumpStats {
  std::int64_t jumps = 0;
  double fraction = 0.0;
  double stderr_fraction = 0.0;
};

JumpStats jump_statistics(const PathBatch& paths);

}  // namespace jumpeq
