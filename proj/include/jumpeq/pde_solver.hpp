#pragma once

#include <functional>
#include <vector>

#include "jumpeq/grid_field.hpp"

namespace jumpeq {

// Terminal-value problems on [0,T] x [x_min,x_max], solved backward in time:
//   0 = u_t + (1/2) u_xx + h u_x + a            (linear)
//   0 = u_t + (1/2) u_xx + h u_x + a - b e^{g u} (semilinear; a, b >= 0)
// with u(T,.) given and zero second spatial derivative at the domain edges
// (boundary unknowns eliminated via linear extrapolation, keeping systems
// tridiagonal).  Advection is differenced centrally; any node with grid
// Peclet |h| dx > 1 falls back to first-order upwinding so the implicit
// matrices stay M-matrices.

enum class Scheme { implicit, crank_nicolson };
enum class SemilinearMode { newton_per_step, picard_global };

// Time stencil used by pde_residual: `central` is the second-order interior
// stencil; the scheme_* variants reproduce the exact one-sided algebra of the
// corresponding solver, so a solved field has residual at rounding level.
enum class TimeStencil { central, scheme_implicit, scheme_crank_nicolson };

struct LinearCoefficients {
  SlicedField h;
  SlicedField a;
  std::function<double(double, int)> g_terminal;  // x, n -> terminal datum
};

struct SemilinearCoefficients {
  SlicedField h;
  SlicedField a;  // >= 0 pointwise
  SlicedField b;  // >= 0 pointwise
  double gamma = 1.0;
  std::function<double(double, int)> g_terminal;
};

struct SolveStats {
  long upwind_nodes = 0;        // assembly events where the Peclet fallback fired
  int max_newton_iterations = 0;
  int picard_sweeps = 0;
};

// Per-sweep record of the frozen-coefficient iteration: deltas[m] is the
// weighted-norm distance between consecutive sweeps at the pinned beta,
// ratios[m] = deltas[m]/deltas[m-1] (NaN for the first sweep).
struct PicardHistory {
  double beta = 0.0;
  std::vector<double> deltas;
  std::vector<double> ratios;
};

struct ResidualReport {
  double slice0 = 0.0;
  double slice1 = 0.0;
  double overall = 0.0;
};

SlicedField solve_linear_cauchy(const LinearCoefficients& c, const GridSpec& grid,
                                Scheme scheme, SolveStats* stats = nullptr);

// tol governs the picard_global sweep termination; newton_per_step always
// solves each step to near machine precision.
SlicedField solve_semilinear_cauchy(const SemilinearCoefficients& c, const GridSpec& grid,
                                    SemilinearMode mode, double tol,
                                    Scheme scheme = Scheme::implicit,
                                    PicardHistory* history = nullptr,
                                    SolveStats* stats = nullptr);

// Max |discrete residual| over interior spatial nodes, per slice and overall.
ResidualReport pde_residual(const SlicedField& u, const LinearCoefficients& c,
                            TimeStencil stencil = TimeStencil::central);
ResidualReport pde_residual(const SlicedField& u, const SemilinearCoefficients& c,
                            TimeStencil stencil = TimeStencil::central);

// Single-slice entry points used by the staged jump-state solve.  Arrays are
// row-major over (time level j) * (nx+1) + k; g has nx+1 entries.
std::vector<double> solve_linear_slice(const GridSpec& grid, const std::vector<double>& h,
                                       const std::vector<double>& a,
                                       const std::vector<double>& g, Scheme scheme,
                                       SolveStats* stats = nullptr);
std::vector<double> solve_semilinear_slice(const GridSpec& grid, const std::vector<double>& h,
                                           const std::vector<double>& a,
                                           const std::vector<double>& b, double gamma,
                                           const std::vector<double>& g, SemilinearMode mode,
                                           double tol, Scheme scheme = Scheme::implicit,
                                           PicardHistory* history = nullptr,
                                           SolveStats* stats = nullptr);

std::vector<double> extract_slice(const SlicedField& u, int n);
SlicedField combine_slices(const GridSpec& grid, const std::vector<double>& slice0,
                           const std::vector<double>& slice1);

}  // namespace jumpeq
