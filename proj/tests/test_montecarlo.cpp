#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "jumpeq/agent_hjb.hpp"
#include "jumpeq/equilibrium.hpp"
#include "jumpeq/errors.hpp"
#include "jumpeq/grid_field.hpp"
#include "jumpeq/montecarlo.hpp"
#include "jumpeq/rng.hpp"

using namespace jumpeq;

namespace {

GridSpec make_grid(double T, double half_width, int nt, int nx) {
  GridSpec g;
  g.T = T;
  g.x_min = -half_width;
  g.x_max = half_width;
  g.nt = nt;
  g.nx = nx;
  g.alpha = 0.5;
  return g;
}

AgentSpec tanh_agent(double gamma) {
  AgentSpec a;
  a.gamma = gamma;
  a.endowment = Endowment::parse("tanh(1, 1, 0)", "tanh(1, 1, 0)");
  a.name = "mc-agent";
  return a;
}

SimConfig sim(std::int64_t n_paths, std::int64_t n_steps, std::uint64_t seed) {
  SimConfig c;
  c.n_paths = n_paths;
  c.n_steps = n_steps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("block cipher known-answer vectors") {
  // frozen reference outputs for the 10-round 4x64 counter engine
  using A4 = std::array<std::uint64_t, 4>;
  const A4 r1 = philox::block({1, 0, 0, 0}, {0, 0});
  CHECK(r1 == A4{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL,
                 0x907d7a052fd5b4dcULL});
  const A4 r2 = philox::block({2, 2, 3, 4}, {0xdeadbeefULL, 0});
  CHECK(r2 == A4{0x293c50a42da88dcdULL, 0x4895f4f3502c1b5bULL, 0xa58c634edb6a1112ULL,
                 0xc7cc5e9759a673bfULL});
  const A4 r3 = philox::block({0, 0, 0, 0}, {~0ULL, ~0ULL});
  CHECK(r3 == A4{0x44b7493d1acfc229ULL, 0x6636af8e997921ddULL, 0x3f73e132b5b3780eULL,
                 0x605644dde03b01b1ULL});
}

TEST_CASE("word-to-uniform mappings cover the intended ranges") {
  CHECK(uniform01(0) == 0.0);
  CHECK(uniform01(~0ULL) < 1.0);
  CHECK(uniform_pos(0) == 1.0);
  CHECK(uniform_pos(~0ULL) > 0.0);
  const auto n = normal_pair(0, 0);  // u1 = 1 -> radius 0
  CHECK(n[0] == 0.0);
  CHECK(n[1] == 0.0);
}

TEST_CASE("rate zero means no jumps anywhere") {
  const PathBatch paths = simulate_paths(0.0, 1.0, sim(2000, 4, 7));
  for (std::int64_t p = 0; p < paths.n_paths; ++p) {
    CHECK(paths.tau[static_cast<std::size_t>(p)] ==
          std::numeric_limits<double>::infinity());
    CHECK(paths.n_terminal(p) == 0);
  }
  CHECK(jump_statistics(paths).jumps == 0);
}

TEST_CASE("jump frequency matches the exponential law") {
  // mu*T = ln 2 puts the jump probability at exactly one half
  const double mu = std::log(2.0);
  const PathBatch paths = simulate_paths(mu, 1.0, sim(100000, 8, 11));
  const JumpStats js = jump_statistics(paths);
  CHECK(js.stderr_fraction > 0.0);
  CHECK(std::fabs(js.fraction - 0.5) <= 4.0 * js.stderr_fraction);
}

TEST_CASE("terminal Brownian value is centred with the right spread") {
  const double T = 2.0;
  const std::int64_t n = 100000, m = 16;
  const PathBatch paths = simulate_paths(0.0, T, sim(n, m, 13));
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t p = 0; p < n; ++p) {
    double bt = 0.0;
    for (std::int64_t s = 0; s < m; ++s) bt += paths.increment(p, s);
    sum += bt;
    sumsq += bt * bt;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sumsq / static_cast<double>(n) - mean * mean;
  CHECK(std::fabs(mean) <= 4.0 * std::sqrt(T / static_cast<double>(n)));
  // variance of the variance estimator for a Gaussian is 2 var^2 / n
  CHECK(std::fabs(var - T) <= 5.0 * T * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("identical configuration reproduces every byte") {
  const SimConfig c = sim(500, 6, 99);
  const PathBatch a = simulate_paths(0.4, 0.5, c);
  const PathBatch b = simulate_paths(0.4, 0.5, c);
  CHECK(a.increments == b.increments);
  CHECK(a.tau == b.tau);

  const PathBatch other = simulate_paths(0.4, 0.5, sim(500, 6, 100));
  CHECK(a.increments != other.increments);

  const GridSpec g = make_grid(0.5, 5.0, 6, 40);
  const AgentSpec agent = tanh_agent(1.0);
  const AgentSolution s = solve_agent_pdde(zero_field(g), agent, 0.4, g, 1e-10);
  const UtilityEstimate e1 = wealth_and_utility(zero_field(g), s.pi, agent, a);
  const UtilityEstimate e2 = wealth_and_utility(zero_field(g), s.pi, agent, b);
  CHECK(e1.mean == e2.mean);
  CHECK(e1.stderr_mean == e2.stderr_mean);
}

TEST_CASE("deterministic payoff collapses to a point mass") {
  const GridSpec g = make_grid(1.0, 3.0, 5, 10);
  AgentSpec a;
  a.gamma = 2.0;
  a.endowment = Endowment::constant(0.7, 0.7);
  const PathBatch paths = simulate_paths(0.3, 1.0, sim(300, 5, 3));
  // zero strategy, flat claim: every path pays -exp(-gamma c) exactly
  const double want = -std::exp(-2.0 * 0.7);
  for (double s : utility_samples(zero_field(g), zero_field(g), a, paths)) CHECK(s == want);
  const UtilityEstimate e = wealth_and_utility(zero_field(g), zero_field(g), a, paths);
  CHECK(std::fabs(e.mean - want) <= 1e-13);
  CHECK(e.stderr_mean <= 1e-13);
}

TEST_CASE("jump-indicator payoff matches its two-point law") {
  const GridSpec g = make_grid(1.0, 3.0, 8, 10);
  AgentSpec a;
  a.gamma = 1.0;
  a.endowment = Endowment::constant(0.0, 1.0);  // pays the jump indicator
  const double mu = std::log(2.0);
  const PathBatch paths = simulate_paths(mu, 1.0, sim(100000, 8, 17));
  const SlicedField lam = constant_field(g, 0.3);  // ignored by a zero strategy
  const UtilityEstimate e = wealth_and_utility(lam, zero_field(g), a, paths);
  const double want = -(0.5 + 0.5 * std::exp(-1.0));
  CHECK(e.stderr_mean > 0.0);
  CHECK(std::fabs(e.mean - want) <= 4.0 * e.stderr_mean);
}

TEST_CASE("trading at the optimal strategy recovers the PDE value") {
  const GridSpec g = make_grid(0.25, 5.0, 100, 100);
  const AgentSpec agent = tanh_agent(1.0);
  const double mu = 0.5;
  const AgentSolution s = solve_agent_pdde(zero_field(g), agent, mu, g, 1e-10);
  const PathBatch paths = simulate_paths(mu, g.T, sim(20000, g.nt, 4242));
  const UtilityEstimate e = wealth_and_utility(zero_field(g), s.pi, agent, paths);
  const double pde_value = evaluate_value(s, 0.0, 0.0, 0.0, 0, agent.gamma);
  CHECK(std::fabs(e.mean - pde_value) <= 4.0 * e.stderr_mean);
}

TEST_CASE("zero perturbation changes nothing") {
  const GridSpec g = make_grid(0.5, 5.0, 10, 20);
  const AgentSpec agent = tanh_agent(1.0);
  const AgentSolution s = solve_agent_pdde(zero_field(g), agent, 0.4, g, 1e-10);
  const PathBatch paths = simulate_paths(0.4, g.T, sim(1000, g.nt, 5));
  const OptimalityReport r =
      verify_optimality(s, zero_field(g), agent, paths, {zero_field(g)}, 0.5);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].diff_mean == 0.0);
  CHECK(r.checks[0].diff_stderr == 0.0);
  CHECK(r.checks[0].quad_coeff == 0.0);
  CHECK(r.checks[0].passed);
  CHECK(r.all_passed);
}

TEST_CASE("constant unit perturbation matches the Gaussian closed form") {
  // flat claim, zero drift: the optimum is to stay out of the market, and
  // overlaying eps shares costs e^{gamma^2 eps^2 T / 2} in certainty terms
  const double c = 0.5, eps = 0.5, T = 1.0;
  const GridSpec g = make_grid(T, 4.0, 16, 16);
  AgentSpec a;
  a.gamma = 1.0;
  a.endowment = Endowment::constant(c, c);
  const AgentSolution s = solve_agent_pdde(zero_field(g), a, 0.0, g, 1e-10);
  CHECK(sup_norm(s.pi) <= 1e-12);

  const PathBatch paths = simulate_paths(0.0, T, sim(100000, g.nt, 21));
  const OptimalityReport r =
      verify_optimality(s, zero_field(g), a, paths, {constant_field(g, 1.0)}, eps);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].passed);
  CHECK(r.all_passed);
  CHECK(r.checks[0].diff_mean > 0.0);  // the perturbation genuinely hurts

  const UtilityEstimate pert =
      wealth_and_utility(zero_field(g), constant_field(g, eps), a, paths);
  const double want = -std::exp(-c + eps * eps * T / 2.0);
  CHECK(std::fabs(pert.mean - want) <= 4.0 * pert.stderr_mean);
  CHECK(std::fabs(r.checks[0].perturbed_mean - pert.mean) <= 1e-10);
}

TEST_CASE("every standard perturbation degrades the optimal strategy") {
  const GridSpec g = make_grid(0.25, 5.0, 60, 60);
  const AgentSpec agent = tanh_agent(1.0);
  const double mu = 0.5;
  const AgentSolution s = solve_agent_pdde(zero_field(g), agent, mu, g, 1e-10);
  const PathBatch paths = simulate_paths(mu, g.T, sim(20000, g.nt, 31));
  const std::vector<SlicedField> shapes = {
      constant_field(g, 1.0),
      field_from_function([](double, double x, int) { return std::tanh(x); }, g),
      field_from_function([](double, double x, int) { return std::sin(x) * std::exp(-x * x); },
                          g)};
  for (double eps : {0.25, 0.5}) {
    const OptimalityReport r = verify_optimality(s, zero_field(g), agent, paths, shapes, eps);
    CHECK(r.checks.size() == shapes.size());
    CHECK(r.all_passed);
  }
}

TEST_CASE("common random numbers beat independent sampling") {
  // The claim must change at the jump, otherwise the single Brownian driver
  // spans the market, the optimal strategy hedges the payoff almost exactly,
  // and the base utility is a near-constant that coupling cannot improve on.
  const GridSpec g = make_grid(0.25, 5.0, 40, 40);
  AgentSpec agent;
  agent.gamma = 1.0;
  agent.endowment = Endowment::parse("tanh(1, 1, 0)", "constant(-0.4)");
  agent.name = "jump-exposed";
  const double mu = 0.8;
  const AgentSolution s = solve_agent_pdde(zero_field(g), agent, mu, g, 1e-10);
  const SlicedField phi = field_from_function(
      [](double, double x, int) { return std::tanh(x); }, g);
  const double eps = 0.5;

  const PathBatch crn_paths = simulate_paths(mu, g.T, sim(10000, g.nt, 51));
  const OptimalityReport r = verify_optimality(s, zero_field(g), agent, crn_paths, {phi}, eps);

  const PathBatch other = simulate_paths(mu, g.T, sim(10000, g.nt, 52));
  const SlicedField pert = lincomb(1.0, s.pi, eps, phi);
  const UtilityEstimate base = wealth_and_utility(zero_field(g), s.pi, agent, crn_paths);
  const UtilityEstimate indep = wealth_and_utility(zero_field(g), pert, agent, other);
  const double indep_stderr =
      std::sqrt(base.stderr_mean * base.stderr_mean + indep.stderr_mean * indep.stderr_mean);
  CHECK(r.checks[0].diff_stderr < 0.8 * indep_stderr);
}

TEST_CASE("bookkeeping of the riskless leg") {
  const GridSpec g = make_grid(0.5, 5.0, 20, 30);
  const PathBatch paths = simulate_paths(0.3, g.T, sim(400, g.nt, 61));
  const SlicedField lam = constant_field(g, 0.2);

  const RisklessReport zero = riskless_position(zero_field(g), lam, paths);
  CHECK(zero.max_abs_rho == 0.0);
  CHECK(zero.max_identity_error == 0.0);

  // constant positions telescope: the riskless leg never carries anything
  const RisklessReport unit = riskless_position(constant_field(g, 1.0), lam, paths);
  CHECK(unit.max_abs_rho <= 1e-12);
  CHECK(unit.max_identity_error <= 1e-12);
  const RisklessReport scaled = riskless_position(constant_field(g, 2.5), lam, paths);
  CHECK(scaled.max_abs_rho <= 1e-12);
  CHECK(scaled.max_identity_error <= 1e-12);

  const SlicedField varying = field_from_function(
      [](double, double x, int) { return std::tanh(x); }, g);
  const RisklessReport moving = riskless_position(varying, lam, paths);
  CHECK(moving.max_abs_rho > 1e-6);  // genuinely rebalances
  CHECK(moving.max_identity_error <= 1e-12);
}

TEST_CASE("clearing holds along simulated paths") {
  const GridSpec g = make_grid(0.25, 5.0, 50, 50);

  MarketSpec trivial;
  trivial.mu = 0.4;
  trivial.T = 0.25;
  {
    AgentSpec a;
    a.gamma = 1.0;
    a.endowment = Endowment::constant(0.3, 0.3);
    a.name = "flat";
    trivial.agents = {a};
  }
  SolverOptions opts;
  opts.tol = 1e-9;
  const EquilibriumResult rt = find_equilibrium(trivial, g, opts);
  REQUIRE(rt.converged);
  const PathBatch paths = simulate_paths(trivial.mu, g.T, sim(2000, g.nt, 71));
  CHECK(verify_clearing_on_paths(rt, paths).max_abs <= 1e-12);

  MarketSpec solo;
  solo.mu = 0.5;
  solo.T = 0.25;
  solo.agents = {tanh_agent(1.0)};
  const EquilibriumResult rs = find_equilibrium(solo, g, opts);
  REQUIRE(rs.converged);
  const PathBatch paths2 = simulate_paths(solo.mu, g.T, sim(2000, g.nt, 72));
  CHECK(verify_clearing_on_paths(rs, paths2).max_abs <=
        opts.tol / gamma_bar(solo.agents) + 1e-9);
}

TEST_CASE("configuration and shape validation") {
  CHECK_THROWS_AS(simulate_paths(0.5, 1.0, sim(0, 4, 1)), ConfigError);
  CHECK_THROWS_AS(simulate_paths(0.5, 1.0, sim(10, 0, 1)), ConfigError);
  CHECK_THROWS_AS(simulate_paths(-0.5, 1.0, sim(10, 4, 1)), ConfigError);

  const GridSpec g = make_grid(0.5, 5.0, 10, 20);
  const AgentSpec agent = tanh_agent(1.0);
  const PathBatch wrong_steps = simulate_paths(0.3, g.T, sim(10, 5, 1));
  CHECK_THROWS_AS(wealth_and_utility(zero_field(g), zero_field(g), agent, wrong_steps),
                  ConfigError);
  const PathBatch wrong_t = simulate_paths(0.3, 0.75, sim(10, g.nt, 1));
  CHECK_THROWS_AS(wealth_and_utility(zero_field(g), zero_field(g), agent, wrong_t),
                  ConfigError);
}
