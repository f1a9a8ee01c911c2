#pragma once

#include <vector>

#include "jumpeq/agent_hjb.hpp"
#include "jumpeq/grid_field.hpp"

namespace jumpeq {

struct MarketSpec {
  double mu = 0.0;  // jump intensity, >= 0
  double T = 1.0;   // horizon; must match the solve grid
  std::vector<AgentSpec> agents;

  void validate(const GridSpec& grid) const;
};

struct SolverOptions {
  Scheme scheme = Scheme::implicit;
  SemilinearMode mode = SemilinearMode::newton_per_step;
  double tol = 1e-8;
  int max_iter = 100;
  double damping = 1.0;  // omega in (0, 1]
};

struct EquilibriumResult {
  SlicedField lambda_star;
  std::vector<AgentSolution> agent_solutions;  // solved at lambda_star
  int iterations = 0;                          // number of aggregate-drift evaluations
  std::vector<double> residual_history;        // sup |Pi(lambda_k) - lambda_k|
  std::vector<double> residual_history_calpha; // same differences in the Hoelder norm
  std::vector<double> iterate_calpha_norms;    // ||lambda_k|| in the Hoelder norm
  std::vector<double> contraction_ratios;      // successive sup-residual ratios
  double clearing_residual = 0.0;              // sup |sum_i pi_i| at lambda_star
  bool converged = false;
  bool diverged = false;                       // tripped the 1e6 runaway guard
};

// harmonic aggregate of the agents' risk aversions: (sum_i 1/gamma_i)^{-1}
double gamma_bar(const std::vector<AgentSpec>& agents);

// Pi(lambda) = gamma_bar * sum_i d/dx u_i(lambda); agents solve independently
// (concurrently when there is more than one) and are combined in spec order.
SlicedField pi_operator(const SlicedField& lambda, const MarketSpec& market,
                        const GridSpec& grid, const SolverOptions& opts);

// Damped fixed-point iteration lambda <- (1-omega) lambda + omega Pi(lambda)
// from lambda = 0.  Stops when the undamped residual sup|Pi(lambda)-lambda|
// falls to tol (equivalently the damped step falls to tol*omega), so the
// reported lambda_star always carries agent solutions solved at itself.
EquilibriumResult find_equilibrium(const MarketSpec& market, const GridSpec& grid,
                                   const SolverOptions& opts);

// sup |sum_i pi_i| over the grid for the stored solutions
double clearing_residual(const EquilibriumResult& result);

struct SmallnessReport {
  double R0 = 0.0;           // initial-iterate norm radius, computed on a T = 1 grid
  double gamma_bar = 0.0;
  bool iterates_in_ball = false;   // all ||lambda_k|| <= R0 during the supplied run
  double max_iterate_calpha = 0.0;
  double max_contraction_ratio = 0.0;
};

// R0 sums the Hoelder norms of the lambda = 0 agent solutions' x-derivatives,
// scaled by 2/gamma_bar, on a horizon-1 grid with the same dt and dx density.
// When `run` is supplied its recorded iterate norms and ratios are audited;
// otherwise an equilibrium run with `opts` is performed internally.
SmallnessReport smallness_diagnostics(const MarketSpec& market, const GridSpec& grid,
                                      const SolverOptions& opts,
                                      const EquilibriumResult* run = nullptr);

}  // namespace jumpeq
