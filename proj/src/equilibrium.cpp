#include "jumpeq/equilibrium.hpp"

#include <cmath>
#include <future>
#include <string>

#include "jumpeq/errors.hpp"

namespace jumpeq {

void MarketSpec::validate(const GridSpec& grid) const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("market.mu must be finite and >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("market.T must be finite and > 0");
  if (T != grid.T) throw ConfigError("market.T must equal grid.T");
  if (agents.empty()) throw ConfigError("market: at least one agent is required");
  for (const AgentSpec& a : agents) a.validate(grid);
}

double gamma_bar(const std::vector<AgentSpec>& agents) {
  if (agents.empty()) throw ConfigError("gamma_bar: empty agent list");
  double inv = 0.0;
  for (const AgentSpec& a : agents) {
    if (!(a.gamma > 0.0)) throw ConfigError("gamma_bar: gamma must be > 0");
    inv += 1.0 / a.gamma;
  }
  return 1.0 / inv;
}

namespace {

void check_options(const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (opts.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  if (!(opts.damping > 0.0) || opts.damping > 1.0)
    throw ConfigError("solver.damping must lie in (0, 1]");
}

// inner PDE tolerance kept safely below the fixed-point tolerance
double inner_tol(const SolverOptions& opts) { return std::max(1e-13, 0.01 * opts.tol); }

std::vector<AgentSolution> solve_all_agents(const SlicedField& lambda,
                                            const MarketSpec& market, const GridSpec& grid,
                                            const SolverOptions& opts) {
  const std::size_t n = market.agents.size();
  std::vector<AgentSolution> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(solve_agent_pdde(lambda, market.agents[0], market.mu, grid, inner_tol(opts),
                                   opts.scheme, opts.mode));
    return out;
  }
  // independent solves; results joined in declaration order for determinism
  std::vector<std::future<AgentSolution>> futs;
  futs.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    futs.push_back(std::async(std::launch::async, [&, i] {
      return solve_agent_pdde(lambda, market.agents[i], market.mu, grid, inner_tol(opts),
                              opts.scheme, opts.mode);
    }));
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

SlicedField sum_u_x(const std::vector<AgentSolution>& sols, double gbar) {
  const GridSpec& grid = sols.front().u_x.grid();
  std::vector<double> v(sols.front().u_x.values().size(), 0.0);
  for (const AgentSolution& s : sols)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s.u_x.values()[i];
  for (double& x : v) x *= gbar;
  return SlicedField(grid, std::move(v));
}

SlicedField sum_pi(const std::vector<AgentSolution>& sols) {
  const GridSpec& grid = sols.front().pi.grid();
  std::vector<double> v(sols.front().pi.values().size(), 0.0);
  for (const AgentSolution& s : sols)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s.pi.values()[i];
  return SlicedField(grid, std::move(v));
}

}  // namespace

SlicedField pi_operator(const SlicedField& lambda, const MarketSpec& market,
                        const GridSpec& grid, const SolverOptions& opts) {
  grid.validate();
  market.validate(grid);
  check_options(opts);
  if (!(lambda.grid() == grid))
    throw ConfigError("pi_operator: lambda field grid does not match the solve grid");
  return sum_u_x(solve_all_agents(lambda, market, grid, opts), gamma_bar(market.agents));
}

EquilibriumResult find_equilibrium(const MarketSpec& market, const GridSpec& grid,
                                   const SolverOptions& opts) {
  grid.validate();
  market.validate(grid);
  check_options(opts);
  const double gbar = gamma_bar(market.agents);
  const double omega = opts.damping;

  SlicedField lam = zero_field(grid);
  std::vector<AgentSolution> sols = solve_all_agents(lam, market, grid, opts);
  SlicedField Pi = sum_u_x(sols, gbar);

  EquilibriumResult res{lam, {}, 0, {}, {}, {}, {}, 0.0, false, false};
  double prev_residual = 0.0;
  for (;;) {
    const SlicedField diff = lincomb(1.0, Pi, -1.0, lam);
    const double r = sup_norm(diff);
    res.iterations += 1;
    res.residual_history.push_back(r);
    res.residual_history_calpha.push_back(calpha_norm(diff));
    res.iterate_calpha_norms.push_back(calpha_norm(lam));
    if (res.iterations > 1) res.contraction_ratios.push_back(r / prev_residual);
    prev_residual = r;

    if (r <= opts.tol) {
      res.converged = true;
      break;
    }
    if (sup_norm(lam) > 1e6) {
      res.diverged = true;
      break;
    }
    if (res.iterations >= opts.max_iter) break;

    lam = lincomb(1.0 - omega, lam, omega, Pi);
    sols = solve_all_agents(lam, market, grid, opts);
    Pi = sum_u_x(sols, gbar);
  }

  res.lambda_star = lam;
  res.agent_solutions = std::move(sols);
  res.clearing_residual = sup_norm(sum_pi(res.agent_solutions));
  return res;
}

double clearing_residual(const EquilibriumResult& result) {
  if (result.agent_solutions.empty())
    throw ConfigError("clearing_residual: result carries no agent solutions");
  return sup_norm(sum_pi(result.agent_solutions));
}

SmallnessReport smallness_diagnostics(const MarketSpec& market, const GridSpec& grid,
                                      const SolverOptions& opts,
                                      const EquilibriumResult* run) {
  grid.validate();
  market.validate(grid);
  check_options(opts);
  SmallnessReport rep;
  rep.gamma_bar = gamma_bar(market.agents);

  // norm radius of the seed iterate, measured on a horizon-1 grid with the
  // same time-step and spatial densities
  GridSpec unit = grid;
  unit.T = 1.0;
  unit.nt = std::max(1, static_cast<int>(std::llround(1.0 / grid.dt())));
  MarketSpec unit_market = market;
  unit_market.T = 1.0;
  const SlicedField zero = zero_field(unit);
  double sum = 0.0;
  for (const AgentSpec& agent : unit_market.agents) {
    AgentSolution s = solve_agent_pdde(zero, agent, unit_market.mu, unit, inner_tol(opts),
                                       opts.scheme, opts.mode);
    sum += calpha_norm(s.u_x);
  }
  rep.R0 = 2.0 / rep.gamma_bar * sum;

  EquilibriumResult local{zero_field(grid), {}, 0, {}, {}, {}, {}, 0.0, false, false};
  const EquilibriumResult* audited = run;
  if (!audited) {
    local = find_equilibrium(market, grid, opts);
    audited = &local;
  }
  rep.max_iterate_calpha = 0.0;
  for (double v : audited->iterate_calpha_norms)
    rep.max_iterate_calpha = std::max(rep.max_iterate_calpha, v);
  rep.iterates_in_ball = rep.max_iterate_calpha <= rep.R0 * (1.0 + 1e-12);
  rep.max_contraction_ratio = 0.0;
  for (double v : audited->contraction_ratios)
    rep.max_contraction_ratio = std::max(rep.max_contraction_ratio, v);
  return rep;
}

}  // namespace jumpeq
