#include "jumpeq/agent_hjb.hpp"

#include <cmath>
#include <string>

#include "jumpeq/errors.hpp"

namespace jumpeq {

void AgentSpec::validate(const GridSpec& grid) const {
  const std::string who = name.empty() ? "agent" : name;
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ConfigError(who + ": gamma must be finite and > 0");
  if (endowment.empty()) throw ConfigError(who + ": endowment is empty");
  // boundedness check: samples and first/second difference quotients finite
  const double dx = grid.dx();
  for (int n = 0; n < 2; ++n) {
    double prev = 0.0, prev2 = 0.0;
    for (int k = 0; k <= grid.nx; ++k) {
      const double v = endowment(grid.x(k), n);
      if (!std::isfinite(v))
        throw ConfigError(who + ": endowment not finite on the grid");
      if (k >= 1 && !std::isfinite((v - prev) / dx))
        throw ConfigError(who + ": endowment first difference not finite");
      if (k >= 2 && !std::isfinite((v - 2.0 * prev + prev2) / (dx * dx)))
        throw ConfigError(who + ": endowment second difference not finite");
      prev2 = prev;
      prev = v;
    }
  }
}

namespace {

inline std::size_t sidx(const GridSpec& g, int j, int k) {
  return static_cast<std::size_t>(j) * (g.nx + 1) + k;
}

}  // namespace

AgentSolution solve_agent_pdde(const SlicedField& lambda, const AgentSpec& agent, double mu,
                               const GridSpec& grid, double tol, Scheme scheme,
                               SemilinearMode mode, SolveStats* stats,
                               PicardHistory* history) {
  grid.validate();
  const std::string who = agent.name.empty() ? "agent" : agent.name;
  if (!(lambda.grid() == grid))
    throw ConfigError(who + ": lambda field grid does not match the solve grid");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError(who + ": mu must be >= 0");
  if (!(tol > 0.0)) throw ConfigError(who + ": tol must be > 0");
  agent.validate(grid);
  const double gamma = agent.gamma;
  const std::size_t nodes = static_cast<std::size_t>(grid.nt + 1) * (grid.nx + 1);

  try {
    // post-jump state first: linear problem in the n = 1 slice
    std::vector<double> lam1 = extract_slice(lambda, 1);
    std::vector<double> h1(nodes), a1(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      h1[i] = -lam1[i];
      a1[i] = lam1[i] * lam1[i] / (2.0 * gamma);
    }
    std::vector<double> g1(grid.nx + 1);
    for (int k = 0; k <= grid.nx; ++k) g1[k] = agent.endowment(grid.x(k), 1);
    std::vector<double> u1 = solve_linear_slice(grid, h1, a1, g1, scheme, stats);

    // pre-jump state: semilinear, coupled to u1 through the zero-order term
    std::vector<double> lam0 = extract_slice(lambda, 0);
    std::vector<double> h0(nodes), a0(nodes), b0(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      h0[i] = -lam0[i];
      a0[i] = (0.5 * lam0[i] * lam0[i] + mu) / gamma;
      b0[i] = (mu / gamma) * std::exp(-gamma * u1[i]);
    }
    std::vector<double> g0(grid.nx + 1);
    for (int k = 0; k <= grid.nx; ++k) g0[k] = agent.endowment(grid.x(k), 0);
    std::vector<double> u0 = solve_semilinear_slice(grid, h0, a0, b0, gamma, g0, mode, tol,
                                                    scheme, history, stats);

    SlicedField u = combine_slices(grid, u0, u1);
    SlicedField ux = derivative_x(u);
    SlicedField pi = lincomb(1.0 / gamma, lambda, -1.0, ux);
    return AgentSolution{std::move(u), std::move(ux), std::move(pi)};
  } catch (const SolverError& e) {
    throw SolverError(who + ": " + e.what());
  }
}

SemilinearCoefficients pdde_coefficients(const SlicedField& lambda, const AgentSpec& agent,
                                         double mu, const SlicedField& u) {
  const GridSpec& grid = lambda.grid();
  const double gamma = agent.gamma;
  SlicedField h = scaled(lambda, -1.0);
  std::vector<double> av(lambda.values().size()), bv(lambda.values().size());
  for (int j = 0; j <= grid.nt; ++j)
    for (int k = 0; k <= grid.nx; ++k) {
      const double l0 = lambda(j, k, 0), l1 = lambda(j, k, 1);
      av[lambda.index(j, k, 0)] = (0.5 * l0 * l0 + mu) / gamma;
      av[lambda.index(j, k, 1)] = l1 * l1 / (2.0 * gamma);
      bv[lambda.index(j, k, 0)] = (mu / gamma) * std::exp(-gamma * u(j, k, 1));
      bv[lambda.index(j, k, 1)] = 0.0;
    }
  SlicedField af(grid, std::move(av));
  SlicedField bf(grid, std::move(bv));
  const Endowment endow = agent.endowment;
  return SemilinearCoefficients{std::move(h), std::move(af), std::move(bf), gamma,
                                [endow](double x, int n) { return endow(x, n); }};
}

double evaluate_value(const AgentSolution& solution, double xi, double t, double x, int n,
                      double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("evaluate_value: gamma must be > 0");
  return -std::exp(-gamma * (xi + interpolate(solution.u, t, x, n)));
}

}  // namespace jumpeq
