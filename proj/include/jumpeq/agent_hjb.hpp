#pragma once

#include <string>

#include "jumpeq/endowment.hpp"
#include "jumpeq/grid_field.hpp"
#include "jumpeq/pde_solver.hpp"

namespace jumpeq {

struct AgentSpec {
  double gamma = 1.0;        // absolute risk aversion, > 0
  Endowment endowment;       // terminal claim g(x, n)
  std::string name;          // used in error messages / output filenames

  void validate(const GridSpec& grid) const;  // finiteness of sampled g, g', g''
};

struct AgentSolution {
  SlicedField u;    // certainty-equivalent value surface
  SlicedField u_x;  // derivative_x(u)
  SlicedField pi;   // optimal stock position lambda/gamma - u_x
};

// Solves the agent's indirect-utility equation for a given market price of
// risk field.  The jump-state slices decouple in one direction: the n = 1
// slice is a linear problem (h = -lambda, a = lambda^2 / (2 gamma)), and its
// solution feeds the n = 0 slice as the semilinear zero-order coefficient
// b = (mu/gamma) e^{-gamma u(.,.,1)} with a = (lambda^2/2 + mu)/gamma.
AgentSolution solve_agent_pdde(const SlicedField& lambda, const AgentSpec& agent, double mu,
                               const GridSpec& grid, double tol,
                               Scheme scheme = Scheme::implicit,
                               SemilinearMode mode = SemilinearMode::newton_per_step,
                               SolveStats* stats = nullptr,
                               PicardHistory* history = nullptr);

// Coefficient bundle whose residual vanishes at the solved u; needs the
// already-solved field for the zero-order coefficient of the n = 0 slice.
SemilinearCoefficients pdde_coefficients(const SlicedField& lambda, const AgentSpec& agent,
                                         double mu, const SlicedField& u);

// Indirect utility -exp(-gamma (xi + u(t, x, n))).
double evaluate_value(const AgentSolution& solution, double xi, double t, double x, int n,
                      double gamma);

}  // namespace jumpeq
