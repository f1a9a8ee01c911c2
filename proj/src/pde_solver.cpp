#include "jumpeq/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "jumpeq/errors.hpp"

namespace jumpeq {

namespace {

// contribution of L u = (1/2) u_xx + h u_x at one node:
// (L u)_k = lo*u_{k-1} + di*u_k + up*u_{k+1}; rows sum to zero.
struct RowCoeff {
  double lo, di, up;
};

inline RowCoeff spatial_row(double h, double dx, long* upwind_count) {
  const double idx2 = 1.0 / (dx * dx);
  if (std::abs(h) * dx > 1.0) {
    if (upwind_count) ++*upwind_count;
    if (h > 0.0) return {0.5 * idx2, -idx2 - h / dx, 0.5 * idx2 + h / dx};
    return {0.5 * idx2 - h / dx, -idx2 + h / dx, 0.5 * idx2};
  }
  const double c = 0.5 * h / dx;
  return {0.5 * idx2 - c, -idx2, 0.5 * idx2 + c};
}

// Thomas elimination; di/rhs are clobbered, solution lands in rhs.
void solve_tridiagonal(std::vector<double>& lo, std::vector<double>& di,
                       std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t m = di.size();
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= di[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

inline std::size_t sidx(const GridSpec& g, int j, int k) {
  return static_cast<std::size_t>(j) * (g.nx + 1) + k;
}

void check_slice_inputs(const GridSpec& grid, const std::vector<double>& h,
                        const std::vector<double>& a, const std::vector<double>& g,
                        const char* who) {
  grid.validate();
  if (grid.nx < 3) throw ConfigError(std::string(who) + ": grid too small (nx < 3)");
  const std::size_t nodes = static_cast<std::size_t>(grid.nt + 1) * (grid.nx + 1);
  if (h.size() != nodes || a.size() != nodes)
    throw ConfigError(std::string(who) + ": coefficient array shape mismatch");
  if (g.size() != static_cast<std::size_t>(grid.nx + 1))
    throw ConfigError(std::string(who) + ": terminal data shape mismatch");
  for (double v : g)
    if (!std::isfinite(v)) throw ConfigError(std::string(who) + ": non-finite terminal datum");
}

void check_level_finite(const std::vector<double>& u, const GridSpec& g, int j,
                        const char* who) {
  for (int k = 0; k <= g.nx; ++k)
    if (!std::isfinite(u[sidx(g, j, k)])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s: non-finite values at time index %d", who, j);
      throw SolverError(buf);
    }
}

// one backward step of the theta-weighted linear scheme on the interior,
// with the boundary unknowns eliminated through u_0 = 2u_1 - u_2 (and the
// mirror condition at nx); returns via `level` (size nx+1)
void linear_step(const GridSpec& grid, const std::vector<double>& h,
                 const std::vector<double>& a, Scheme scheme, int j,
                 const std::vector<double>& next, std::vector<double>& level,
                 long* upwind_count) {
  const int nx = grid.nx;
  const double dt = grid.dt(), dx = grid.dx();
  const double dtt = scheme == Scheme::implicit ? dt : 0.5 * dt;
  const int m = nx - 1;
  std::vector<double> lo(m), di(m), up(m), rhs(m);
  for (int k = 1; k < nx; ++k) {
    const RowCoeff rc = spatial_row(h[sidx(grid, j, k)], dx, upwind_count);
    lo[k - 1] = -dtt * rc.lo;
    di[k - 1] = 1.0 - dtt * rc.di;
    up[k - 1] = -dtt * rc.up;
    double r = next[k];
    if (scheme == Scheme::implicit) {
      r += dt * a[sidx(grid, j, k)];
    } else {
      const RowCoeff re = spatial_row(h[sidx(grid, j + 1, k)], dx, nullptr);
      r += dtt * (re.lo * next[k - 1] + re.di * next[k] + re.up * next[k + 1]);
      r += dtt * (a[sidx(grid, j, k)] + a[sidx(grid, j + 1, k)]);
    }
    rhs[k - 1] = r;
  }
  di[0] += 2.0 * lo[0];
  up[0] -= lo[0];
  lo[0] = 0.0;
  di[m - 1] += 2.0 * up[m - 1];
  lo[m - 1] -= up[m - 1];
  up[m - 1] = 0.0;
  solve_tridiagonal(lo, di, up, rhs);
  for (int k = 1; k < nx; ++k) level[k] = rhs[k - 1];
  level[0] = 2.0 * level[1] - level[2];
  level[nx] = 2.0 * level[nx - 1] - level[nx - 2];
}

}  // namespace

std::vector<double> extract_slice(const SlicedField& u, int n) {
  const GridSpec& g = u.grid();
  std::vector<double> out(static_cast<std::size_t>(g.nt + 1) * (g.nx + 1));
  for (int j = 0; j <= g.nt; ++j)
    for (int k = 0; k <= g.nx; ++k) out[sidx(g, j, k)] = u(j, k, n);
  return out;
}

SlicedField combine_slices(const GridSpec& grid, const std::vector<double>& slice0,
                           const std::vector<double>& slice1) {
  std::vector<double> v(static_cast<std::size_t>(grid.nt + 1) * (grid.nx + 1) * 2);
  std::size_t idx = 0;
  for (int j = 0; j <= grid.nt; ++j)
    for (int k = 0; k <= grid.nx; ++k) {
      v[idx++] = slice0[sidx(grid, j, k)];
      v[idx++] = slice1[sidx(grid, j, k)];
    }
  return SlicedField(grid, std::move(v));
}

std::vector<double> solve_linear_slice(const GridSpec& grid, const std::vector<double>& h,
                                       const std::vector<double>& a,
                                       const std::vector<double>& g, Scheme scheme,
                                       SolveStats* stats) {
  check_slice_inputs(grid, h, a, g, "solve_linear_slice");
  const int nt = grid.nt, nx = grid.nx;
  std::vector<double> u(static_cast<std::size_t>(nt + 1) * (nx + 1));
  for (int k = 0; k <= nx; ++k) u[sidx(grid, nt, k)] = g[k];
  std::vector<double> level(nx + 1), next(nx + 1);
  long* uw = stats ? &stats->upwind_nodes : nullptr;
  for (int j = nt - 1; j >= 0; --j) {
    for (int k = 0; k <= nx; ++k) next[k] = u[sidx(grid, j + 1, k)];
    linear_step(grid, h, a, scheme, j, next, level, uw);
    for (int k = 0; k <= nx; ++k) u[sidx(grid, j, k)] = level[k];
    check_level_finite(u, grid, j, "solve_linear_slice");
  }
  return u;
}

namespace {

// Newton solve of one implicit/CN step of the semilinear equation.  The
// Jacobian is the linear-step matrix plus the positive diagonal
// dtt * gamma * b * e^{gamma v}, so it stays strictly diagonally dominant.
void semilinear_step_newton(const GridSpec& grid, const std::vector<double>& h,
                            const std::vector<double>& a, const std::vector<double>& b,
                            double gamma, Scheme scheme, int j,
                            const std::vector<double>& next, std::vector<double>& level,
                            long* upwind_count, int* max_newton) {
  const int nx = grid.nx;
  const double dt = grid.dt(), dx = grid.dx();
  const double dtt = scheme == Scheme::implicit ? dt : 0.5 * dt;
  const int m = nx - 1;

  // frozen per-step quantities: eliminated row coefficients and the rhs
  std::vector<double> lo0(m), di0(m), up0(m), rhs0(m);
  for (int k = 1; k < nx; ++k) {
    const RowCoeff rc = spatial_row(h[sidx(grid, j, k)], dx, upwind_count);
    lo0[k - 1] = -dtt * rc.lo;
    di0[k - 1] = 1.0 - dtt * rc.di;
    up0[k - 1] = -dtt * rc.up;
    double r = next[k];
    if (scheme == Scheme::implicit) {
      r += dt * a[sidx(grid, j, k)];
    } else {
      const RowCoeff re = spatial_row(h[sidx(grid, j + 1, k)], dx, nullptr);
      r += dtt * (re.lo * next[k - 1] + re.di * next[k] + re.up * next[k + 1]);
      r += dtt * (a[sidx(grid, j, k)] + a[sidx(grid, j + 1, k)]);
      r -= dtt * b[sidx(grid, j + 1, k)] * std::exp(gamma * next[k]);
    }
    rhs0[k - 1] = r;
  }
  di0[0] += 2.0 * lo0[0];
  up0[0] -= lo0[0];
  lo0[0] = 0.0;
  di0[m - 1] += 2.0 * up0[m - 1];
  lo0[m - 1] -= up0[m - 1];
  up0[m - 1] = 0.0;

  std::vector<double> v(m);
  for (int k = 1; k < nx; ++k) v[k - 1] = next[k];
  std::vector<double> lo(m), di(m), up(m), res(m);
  bool done = false;
  for (int it = 1; it <= 50; ++it) {
    double vmax = 0.0;
    for (int i = 0; i < m; ++i) vmax = std::max(vmax, std::abs(v[i]));
    for (int i = 0; i < m; ++i) {
      const double e = std::exp(gamma * v[i]);
      if (!std::isfinite(e)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "semilinear step: exponential overflow at time index %d", j);
        throw SolverError(buf);
      }
      const double bk = b[sidx(grid, j, i + 1)];
      // F(v) = (I - dtt L) v + dtt b e^{gamma v} - rhs0
      double F = di0[i] * v[i] + dtt * bk * e - rhs0[i];
      if (i > 0) F += lo0[i] * v[i - 1];
      if (i + 1 < m) F += up0[i] * v[i + 1];
      res[i] = -F;
      lo[i] = lo0[i];
      up[i] = up0[i];
      di[i] = di0[i] + dtt * gamma * bk * e;
    }
    solve_tridiagonal(lo, di, up, res);
    double dmax = 0.0;
    for (int i = 0; i < m; ++i) {
      v[i] += res[i];
      dmax = std::max(dmax, std::abs(res[i]));
    }
    if (max_newton) *max_newton = std::max(*max_newton, it);
    if (dmax <= 1e-13 * (1.0 + vmax)) {
      done = true;
      break;
    }
  }
  if (!done) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "semilinear step: Newton did not converge at time index %d", j);
    throw SolverError(buf);
  }
  for (int k = 1; k < nx; ++k) level[k] = v[k - 1];
  level[0] = 2.0 * level[1] - level[2];
  level[nx] = 2.0 * level[nx - 1] - level[nx - 2];
}

double slice_sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> solve_semilinear_slice(const GridSpec& grid, const std::vector<double>& h,
                                           const std::vector<double>& a,
                                           const std::vector<double>& b, double gamma,
                                           const std::vector<double>& g, SemilinearMode mode,
                                           double tol, Scheme scheme, PicardHistory* history,
                                           SolveStats* stats) {
  check_slice_inputs(grid, h, a, g, "solve_semilinear_slice");
  if (b.size() != a.size())
    throw ConfigError("solve_semilinear_slice: coefficient array shape mismatch");
  if (!(gamma > 0.0)) throw ConfigError("solve_semilinear_slice: gamma must be > 0");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0.0) throw ConfigError("solve_semilinear_slice: a must be >= 0 pointwise");
    if (b[i] < 0.0) throw ConfigError("solve_semilinear_slice: b must be >= 0 pointwise");
  }
  if (!(tol > 0.0)) throw ConfigError("solve_semilinear_slice: tol must be > 0");
  const int nt = grid.nt, nx = grid.nx;

  if (mode == SemilinearMode::newton_per_step) {
    std::vector<double> u(static_cast<std::size_t>(nt + 1) * (nx + 1));
    for (int k = 0; k <= nx; ++k) u[sidx(grid, nt, k)] = g[k];
    std::vector<double> level(nx + 1), next(nx + 1);
    long* uw = stats ? &stats->upwind_nodes : nullptr;
    int* mn = stats ? &stats->max_newton_iterations : nullptr;
    for (int j = nt - 1; j >= 0; --j) {
      for (int k = 0; k <= nx; ++k) next[k] = u[sidx(grid, j + 1, k)];
      semilinear_step_newton(grid, h, a, b, gamma, scheme, j, next, level, uw, mn);
      for (int k = 0; k <= nx; ++k) u[sidx(grid, j, k)] = level[k];
      check_level_finite(u, grid, j, "solve_semilinear_slice");
    }
    return u;
  }

  // picard_global: freeze the exponential, solve the linear problem with
  // source a - b e^{gamma w}, and contract in the weighted norm at the
  // pinned beta = 2 gamma ||b|| exp(gamma (T||a|| + ||g||)).
  double sup_a = slice_sup(a), sup_b = slice_sup(b), sup_g = slice_sup(g);
  const double beta = 2.0 * gamma * sup_b * std::exp(gamma * (grid.T * sup_a + sup_g));
  if (history) {
    history->beta = beta;
    history->deltas.clear();
    history->ratios.clear();
  }
  auto weighted_delta = [&](const std::vector<double>& u1, const std::vector<double>& u2) {
    double m = 0.0;
    for (int j = 0; j <= nt; ++j) {
      const double w = std::exp(-beta * (grid.T - grid.t(j)));
      double lvl = 0.0;
      for (int k = 0; k <= nx; ++k)
        lvl = std::max(lvl, std::abs(u1[sidx(grid, j, k)] - u2[sidx(grid, j, k)]));
      m = std::max(m, w * lvl);
    }
    return m;
  };

  std::vector<double> w = solve_linear_slice(grid, h, a, g, scheme, stats);
  std::vector<double> src(a.size());
  double prev_delta = std::numeric_limits<double>::quiet_NaN();
  int stalled = 0;
  const int kMaxSweeps = 10000;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    for (std::size_t i = 0; i < src.size(); ++i) {
      src[i] = a[i] - b[i] * std::exp(gamma * w[i]);
      if (!std::isfinite(src[i]))
        throw SolverError("picard sweep: non-finite frozen source");
    }
    std::vector<double> u = solve_linear_slice(grid, h, src, g, scheme, stats);
    const double delta = weighted_delta(u, w);
    double sup_delta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      sup_delta = std::max(sup_delta, std::abs(u[i] - w[i]));
    if (history) {
      history->deltas.push_back(delta);
      history->ratios.push_back(prev_delta > 0.0 ? delta / prev_delta
                                                 : std::numeric_limits<double>::quiet_NaN());
    }
    if (stats) stats->picard_sweeps = sweep;
    if (prev_delta > 0.0 && delta >= prev_delta) {
      if (++stalled >= 5) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "picard sweeps stopped contracting (last delta %.3e after %d sweeps, "
                      "beta=%.3e)",
                      delta, sweep, beta);
        throw SolverError(buf);
      }
    } else {
      stalled = 0;
    }
    w.swap(u);
    if (sup_delta <= 0.1 * tol) return w;
    prev_delta = delta;
  }
  throw SolverError("picard sweep cap exceeded without meeting tolerance");
}

namespace {

std::vector<double> terminal_samples(const GridSpec& grid,
                                     const std::function<double(double, int)>& g_terminal,
                                     int n) {
  if (!g_terminal) throw ConfigError("pde solve: terminal data callable is empty");
  std::vector<double> g(grid.nx + 1);
  for (int k = 0; k <= grid.nx; ++k) g[k] = g_terminal(grid.x(k), n);
  return g;
}

void check_field_grids(const GridSpec& grid, const SlicedField& h, const SlicedField& a,
                       const char* who) {
  if (!(h.grid() == grid) || !(a.grid() == grid))
    throw ConfigError(std::string(who) + ": coefficient fields on a different grid");
}

}  // namespace

SlicedField solve_linear_cauchy(const LinearCoefficients& c, const GridSpec& grid,
                                Scheme scheme, SolveStats* stats) {
  grid.validate();
  check_field_grids(grid, c.h, c.a, "solve_linear_cauchy");
  std::vector<std::vector<double>> out(2);
  for (int n = 0; n < 2; ++n)
    out[n] = solve_linear_slice(grid, extract_slice(c.h, n), extract_slice(c.a, n),
                                terminal_samples(grid, c.g_terminal, n), scheme, stats);
  return combine_slices(grid, out[0], out[1]);
}

SlicedField solve_semilinear_cauchy(const SemilinearCoefficients& c, const GridSpec& grid,
                                    SemilinearMode mode, double tol, Scheme scheme,
                                    PicardHistory* history, SolveStats* stats) {
  grid.validate();
  check_field_grids(grid, c.h, c.a, "solve_semilinear_cauchy");
  if (!(c.b.grid() == grid))
    throw ConfigError("solve_semilinear_cauchy: coefficient fields on a different grid");
  std::vector<std::vector<double>> out(2);
  for (int n = 0; n < 2; ++n)
    out[n] = solve_semilinear_slice(grid, extract_slice(c.h, n), extract_slice(c.a, n),
                                    extract_slice(c.b, n), c.gamma,
                                    terminal_samples(grid, c.g_terminal, n), mode, tol,
                                    scheme, n == 0 ? history : nullptr, stats);
  return combine_slices(grid, out[0], out[1]);
}

namespace {

// shared residual walk; `b` may be null for the linear problem
ResidualReport residual_impl(const SlicedField& u, const SlicedField& h,
                             const SlicedField& a, const SlicedField* b, double gamma,
                             TimeStencil stencil) {
  const GridSpec& g = u.grid();
  if (!(h.grid() == g) || !(a.grid() == g) || (b && !(b->grid() == g)))
    throw ConfigError("pde_residual: fields on different grids");
  if (g.nx < 3 || g.nt < 2) throw ConfigError("pde_residual: grid too small");
  const double dt = g.dt(), dx = g.dx();
  ResidualReport rep;
  for (int n = 0; n < 2; ++n) {
    double worst = 0.0;
    if (stencil == TimeStencil::central) {
      for (int j = 1; j < g.nt; ++j)
        for (int k = 1; k < g.nx; ++k) {
          const double ut = (u(j + 1, k, n) - u(j - 1, k, n)) / (2.0 * dt);
          const double uxx = (u(j, k + 1, n) - 2.0 * u(j, k, n) + u(j, k - 1, n)) / (dx * dx);
          const double ux = (u(j, k + 1, n) - u(j, k - 1, n)) / (2.0 * dx);
          double r = ut + 0.5 * uxx + h(j, k, n) * ux + a(j, k, n);
          if (b) r -= (*b)(j, k, n) * std::exp(gamma * u(j, k, n));
          worst = std::max(worst, std::abs(r));
        }
    } else {
      const bool cn = stencil == TimeStencil::scheme_crank_nicolson;
      for (int j = 0; j < g.nt; ++j)
        for (int k = 1; k < g.nx; ++k) {
          const double ut = (u(j + 1, k, n) - u(j, k, n)) / dt;
          auto level_terms = [&](int jj) {
            const RowCoeff rc = spatial_row(h(jj, k, n), dx, nullptr);
            double v = rc.lo * u(jj, k - 1, n) + rc.di * u(jj, k, n) +
                       rc.up * u(jj, k + 1, n) + a(jj, k, n);
            if (b) v -= (*b)(jj, k, n) * std::exp(gamma * u(jj, k, n));
            return v;
          };
          const double sp = cn ? 0.5 * (level_terms(j) + level_terms(j + 1))
                               : level_terms(j);
          worst = std::max(worst, std::abs(ut + sp));
        }
    }
    if (n == 0)
      rep.slice0 = worst;
    else
      rep.slice1 = worst;
  }
  rep.overall = std::max(rep.slice0, rep.slice1);
  return rep;
}

}  // namespace

ResidualReport pde_residual(const SlicedField& u, const LinearCoefficients& c,
                            TimeStencil stencil) {
  return residual_impl(u, c.h, c.a, nullptr, 0.0, stencil);
}

ResidualReport pde_residual(const SlicedField& u, const SemilinearCoefficients& c,
                            TimeStencil stencil) {
  return residual_impl(u, c.h, c.a, &c.b, c.gamma, stencil);
}

}  // namespace jumpeq
