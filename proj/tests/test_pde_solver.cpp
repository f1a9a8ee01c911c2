#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "jumpeq/errors.hpp"
#include "jumpeq/pde_solver.hpp"
#include "jumpeq/rng.hpp"

using namespace jumpeq;

namespace {

GridSpec oracle_grid(int nt, int nx) {
  GridSpec g;
  g.T = 0.5;
  g.x_min = -4.0 * M_PI;
  g.x_max = 4.0 * M_PI;
  g.nt = nt;
  g.nx = nx;
  g.alpha = 0.5;
  return g;
}

LinearCoefficients heat_problem(const GridSpec& g) {
  return LinearCoefficients{zero_field(g), zero_field(g),
                            [](double x, int) { return std::cos(x); }};
}

// max error against a reference, restricted to |x| <= half of the domain so
// the extrapolation boundary layer is excluded
double central_error(const SlicedField& u, const std::function<double(double, double)>& ref) {
  const GridSpec& g = u.grid();
  const double cut = 0.5 * std::max(std::fabs(g.x_min), std::fabs(g.x_max));
  double err = 0.0;
  for (int j = 0; j <= g.nt; ++j)
    for (int k = 0; k <= g.nx; ++k) {
      if (std::fabs(g.x(k)) > cut) continue;
      for (int n = 0; n < 2; ++n)
        err = std::max(err, std::fabs(u(j, k, n) - ref(g.t(j), g.x(k))));
    }
  return err;
}

}  // namespace

TEST_CASE("heat oracle: backward Euler and Crank-Nicolson hit the closed form") {
  const GridSpec g = oracle_grid(400, 400);
  const auto ref = [&g](double t, double x) { return std::exp(-(g.T - t) / 2.0) * std::cos(x); };

  const SlicedField be = solve_linear_cauchy(heat_problem(g), g, Scheme::implicit);
  CHECK(central_error(be, ref) <= 2e-3);

  const SlicedField cn = solve_linear_cauchy(heat_problem(g), g, Scheme::crank_nicolson);
  CHECK(central_error(cn, ref) <= 5e-4);
}

TEST_CASE("terminal data is reproduced exactly at nodes") {
  const GridSpec g = oracle_grid(20, 50);
  const SlicedField u = solve_linear_cauchy(heat_problem(g), g, Scheme::implicit);
  for (int k = 0; k <= g.nx; ++k) CHECK(u(g.nt, k, 0) == std::cos(g.x(k)));
}

TEST_CASE("constant source integrates exactly: a = 1, g = 0 gives u = T - t") {
  const GridSpec g = oracle_grid(16, 30);
  const LinearCoefficients c{zero_field(g), constant_field(g, 1.0),
                             [](double, int) { return 0.0; }};
  for (Scheme s : {Scheme::implicit, Scheme::crank_nicolson}) {
    const SlicedField u = solve_linear_cauchy(c, g, s);
    double err = 0.0;
    for (int j = 0; j <= g.nt; ++j)
      for (int k = 0; k <= g.nx; ++k)
        err = std::max(err, std::fabs(u(j, k, 0) - (g.T - g.t(j))));
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("constant drift oracle") {
  const GridSpec g = oracle_grid(400, 400);
  const double lam = 0.3, gamma = 1.0;
  const LinearCoefficients c{constant_field(g, -lam),
                             constant_field(g, lam * lam / (2.0 * gamma)),
                             [](double x, int) { return std::cos(x); }};
  const SlicedField u = solve_linear_cauchy(c, g, Scheme::implicit);
  const auto ref = [&](double t, double x) {
    const double s = g.T - t;
    return std::exp(-s / 2.0) * std::cos(x - lam * s) + lam * lam * s / (2.0 * gamma);
  };
  CHECK(central_error(u, ref) <= 5e-3);
}

TEST_CASE("linear maximum principle and weighted-norm estimate") {
  // random smooth instances: bump-localized drift and source so all fields are
  // flat where the extrapolation boundary condition acts
  const CounterRng rng(99, 1);
  for (std::uint64_t inst = 0; inst < 6; ++inst) {
    const GridSpec g = oracle_grid(30, 60);
    const double c1 = 8.0 * rng.uniform(inst, 0, 0) - 4.0;
    const double c2 = 8.0 * rng.uniform(inst, 1, 0) - 4.0;
    const double amp_h = 2.0 * rng.uniform(inst, 2, 0) - 1.0;
    const double amp_a = rng.uniform(inst, 3, 0);
    const SlicedField h = field_from_function(
        [&](double t, double x, int) {
          return amp_h * std::sin(x + 2.0 * t) * std::exp(-(x - c1) * (x - c1));
        },
        g);
    const SlicedField a = field_from_function(
        [&](double t, double x, int) {
          return amp_a * (1.0 + std::cos(x - t)) * std::exp(-(x - c2) * (x - c2));
        },
        g);
    const LinearCoefficients c{h, a, [](double x, int) { return std::tanh(x); }};
    const SlicedField u = solve_linear_cauchy(c, g, Scheme::implicit);

    const double gsup = std::tanh(std::fabs(g.x_max));
    CHECK(sup_norm(u) <= g.T * sup_norm(a) + gsup + 1e-8);

    // discrete time integration of the weighted source costs at most an extra
    // dt per unit of weighted source norm
    for (double beta : {1.0, 10.0, 100.0}) {
      const double wa = weighted_beta_norm(a, beta);
      CHECK(weighted_beta_norm(u, beta) <= wa / beta + gsup + 1e-8 + g.dt() * wa);
    }
  }
}

TEST_CASE("semilinear with b = 0 equals the linear solver") {
  const GridSpec g = oracle_grid(25, 40);
  const LinearCoefficients lin{constant_field(g, 0.25), constant_field(g, 0.5),
                               [](double x, int) { return std::cos(x); }};
  const SemilinearCoefficients semi{lin.h, lin.a, zero_field(g), 1.0, lin.g_terminal};
  const SlicedField ulin = solve_linear_cauchy(lin, g, Scheme::implicit);
  for (SemilinearMode mode : {SemilinearMode::newton_per_step, SemilinearMode::picard_global}) {
    const SlicedField usemi = solve_semilinear_cauchy(semi, g, mode, 1e-10);
    double err = 0.0;
    for (std::size_t i = 0; i < ulin.values().size(); ++i)
      err = std::max(err, std::fabs(ulin.values()[i] - usemi.values()[i]));
    CHECK(err <= 1e-9);
  }
}

TEST_CASE("semilinear ODE oracle: pure decay solves a scalar ODE") {
  GridSpec g;
  g.T = 1.0;
  g.x_min = -1.0;
  g.x_max = 1.0;
  g.nt = 400;
  g.nx = 8;
  const double b0 = 1.0, gamma = 1.0;
  const SemilinearCoefficients c{zero_field(g), zero_field(g), constant_field(g, b0), gamma,
                                 [](double, int) { return 0.0; }};
  const SlicedField u = solve_semilinear_cauchy(c, g, SemilinearMode::newton_per_step, 1e-12);
  // u_t = b0 e^{gamma u}, u(T) = 0  =>  u(t) = -(1/gamma) ln(1 + gamma b0 (T-t))
  double err = 0.0;
  for (int j = 0; j <= g.nt; ++j) {
    const double ref = -std::log(1.0 + gamma * b0 * (g.T - g.t(j))) / gamma;
    for (int k = 0; k <= g.nx; ++k) err = std::max(err, std::fabs(u(j, k, 0) - ref));
  }
  CHECK(err <= 1e-6 + g.dt());

  // this solution attains the lower bound of the two-sided estimate exactly
  const double lower = -std::log(std::exp(0.0) + gamma * g.T * b0) / gamma;
  double umin = 0.0;
  for (double v : u.values()) umin = std::min(umin, v);
  CHECK(umin >= lower - 1e-6 - g.dt());
  CHECK(umin <= lower + 1e-6 + g.dt());
}

TEST_CASE("semilinear two-sided bounds hold on randomized instances") {
  const CounterRng rng(7, 3);
  for (std::uint64_t inst = 0; inst < 8; ++inst) {
    GridSpec g;
    g.T = 0.25 + 0.5 * rng.uniform(inst, 0, 0);
    g.x_min = -3.0;
    g.x_max = 3.0;
    g.nt = 60;
    g.nx = 60;
    const double gamma = 0.5 + 1.5 * rng.uniform(inst, 1, 0);
    const double amp_h = 2.0 * rng.uniform(inst, 2, 0) - 1.0;
    const SlicedField h = field_from_function(
        [&](double t, double x, int) {
          return amp_h * std::sin(2.0 * x - t) * std::exp(-x * x / 4.0);
        },
        g);
    const SlicedField a = field_from_function(
        [&](double t, double x, int) { return 0.5 * (1.0 + std::sin(x + t)); }, g);
    const SlicedField b = field_from_function(
        [&](double t, double x, int) { return 0.5 * (1.0 + std::cos(x - t)); }, g);
    const SemilinearCoefficients c{h, a, b, gamma, [](double x, int) { return std::tanh(x); }};
    const SlicedField u = solve_semilinear_cauchy(c, g, SemilinearMode::newton_per_step, 1e-10);

    const double gsup = std::tanh(3.0);
    const double upper = gsup + g.T * sup_norm(a);
    const double lower = -std::log(std::exp(gamma * gsup) + gamma * g.T * sup_norm(b)) / gamma;
    const double scale = 1.0 + sup_norm(a) + sup_norm(b) + gsup;
    const double slack = 1e-8 + 10.0 * (g.dt() + g.dx() * g.dx()) * scale;
    for (double v : u.values()) {
      CHECK(v <= upper + slack);
      CHECK(v >= lower - slack);
    }
  }
}

TEST_CASE("newton and picard modes agree") {
  GridSpec g;
  g.T = 0.5;
  g.x_min = -3.0;
  g.x_max = 3.0;
  g.nt = 50;
  g.nx = 50;
  const SemilinearCoefficients c{constant_field(g, -0.2), constant_field(g, 0.3),
                                 constant_field(g, 0.4), 1.2,
                                 [](double x, int) { return std::tanh(x); }};
  const double tol = 1e-9;
  const SlicedField un = solve_semilinear_cauchy(c, g, SemilinearMode::newton_per_step, tol);
  PicardHistory hist;
  const SlicedField up =
      solve_semilinear_cauchy(c, g, SemilinearMode::picard_global, tol, Scheme::implicit, &hist);
  double err = 0.0;
  for (std::size_t i = 0; i < un.values().size(); ++i)
    err = std::max(err, std::fabs(un.values()[i] - up.values()[i]));
  CHECK(err <= 10.0 * tol);

  // the frozen-coefficient sweep contracts at the pinned beta
  REQUIRE(hist.deltas.size() >= 2);
  CHECK(hist.beta > 0.0);
  for (std::size_t m = 1; m < hist.ratios.size(); ++m) CHECK(hist.ratios[m] < 1.0);
}

TEST_CASE("pde_residual reference values") {
  GridSpec g;
  g.T = 1.0;
  g.x_min = -2.0;
  g.x_max = 2.0;
  g.nt = 10;
  g.nx = 20;

  // u = 0 with unit source leaves exactly the source
  const LinearCoefficients c0{zero_field(g), constant_field(g, 1.0),
                              [](double, int) { return 0.0; }};
  CHECK(pde_residual(zero_field(g), c0).overall == doctest::Approx(1.0).epsilon(1e-14));

  // u = T - t solves u_t + 1 = 0 exactly under every stencil
  const SlicedField ulin = field_from_function(
      [&g](double t, double, int) { return g.T - t; }, g);
  CHECK(pde_residual(ulin, c0).overall <= 1e-12);
  CHECK(pde_residual(ulin, c0, TimeStencil::scheme_implicit).overall <= 1e-12);

  // a solved field re-evaluated with the solver's own stencil is residual-free
  const LinearCoefficients heat{zero_field(g), zero_field(g),
                                [](double x, int) { return std::cos(x); }};
  const SlicedField u = solve_linear_cauchy(heat, g, Scheme::implicit);
  CHECK(pde_residual(u, heat, TimeStencil::scheme_implicit).overall <= 1e-10);
  const SlicedField ucn = solve_linear_cauchy(heat, g, Scheme::crank_nicolson);
  CHECK(pde_residual(ucn, heat, TimeStencil::scheme_crank_nicolson).overall <= 1e-10);
}

TEST_CASE("semilinear residual consistency for the scheme stencil") {
  GridSpec g;
  g.T = 0.5;
  g.x_min = -3.0;
  g.x_max = 3.0;
  g.nt = 40;
  g.nx = 40;
  const SemilinearCoefficients c{constant_field(g, 0.1), constant_field(g, 0.2),
                                 constant_field(g, 0.3), 1.0,
                                 [](double x, int) { return std::tanh(x); }};
  const SlicedField u = solve_semilinear_cauchy(c, g, SemilinearMode::newton_per_step, 1e-12);
  CHECK(pde_residual(u, c, TimeStencil::scheme_implicit).overall <= 1e-9);
  const ResidualReport central = pde_residual(u, c);
  CHECK(central.overall <= 1.0);  // truncation-level, not machine-level
  CHECK(central.overall == std::max(central.slice0, central.slice1));
}

TEST_CASE("coefficient validation") {
  GridSpec g;
  g.T = 0.5;
  g.x_min = -1.0;
  g.x_max = 1.0;
  g.nt = 5;
  g.nx = 8;
  const SemilinearCoefficients bad_b{zero_field(g), zero_field(g), constant_field(g, -0.1),
                                     1.0, [](double, int) { return 0.0; }};
  CHECK_THROWS_AS(
      solve_semilinear_cauchy(bad_b, g, SemilinearMode::newton_per_step, 1e-8), ConfigError);
  const SemilinearCoefficients bad_gamma{zero_field(g), zero_field(g), zero_field(g), -1.0,
                                         [](double, int) { return 0.0; }};
  CHECK_THROWS_AS(
      solve_semilinear_cauchy(bad_gamma, g, SemilinearMode::newton_per_step, 1e-8), ConfigError);
}

TEST_CASE("nonlinearity overflow is reported, not propagated") {
  GridSpec g;
  g.T = 0.5;
  g.x_min = -1.0;
  g.x_max = 1.0;
  g.nt = 10;
  g.nx = 8;
  // e^{gamma u} overflows immediately at the terminal level
  const SemilinearCoefficients c{zero_field(g), zero_field(g), constant_field(g, 1.0),
                                 50.0, [](double, int) { return 20.0; }};
  CHECK_THROWS_WITH_AS(
      solve_semilinear_cauchy(c, g, SemilinearMode::newton_per_step, 1e-8),
      doctest::Contains("exponential overflow"), SolverError);
  CHECK_THROWS_WITH_AS(
      solve_semilinear_cauchy(c, g, SemilinearMode::picard_global, 1e-8),
      doctest::Contains("non-finite frozen source"), SolverError);
}

TEST_CASE("grid convergence orders on the heat oracle") {
  const auto err_at = [](int nt, int nx, Scheme s) {
    const GridSpec g = oracle_grid(nt, nx);
    const SlicedField u = solve_linear_cauchy(heat_problem(g), g, s);
    return central_error(u, [&g](double t, double x) {
      return std::exp(-(g.T - t) / 2.0) * std::cos(x);
    });
  };
  // time refinement at first order (spatial error frozen small via fine nx)
  const double et1 = err_at(8, 2000, Scheme::implicit);
  const double et2 = err_at(16, 2000, Scheme::implicit);
  CHECK(et1 / et2 >= 1.7);
  CHECK(et1 / et2 <= 2.3);
  // space refinement at second order (temporal error frozen via fine nt)
  const double ex1 = err_at(4000, 50, Scheme::implicit);
  const double ex2 = err_at(4000, 100, Scheme::implicit);
  CHECK(ex1 / ex2 >= 3.4);
  CHECK(ex1 / ex2 <= 4.6);
}
