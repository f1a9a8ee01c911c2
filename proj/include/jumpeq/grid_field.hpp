#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace jumpeq {

// Uniform grid on [0,T] x [x_min,x_max] x {0,1}.
// Time nodes t_j = j*dt (j = 0..nt), space nodes x_k = x_min + k*dx (k = 0..nx);
// the final node is pinned to T resp. x_max exactly so rounding never produces
// an off-domain coordinate.  alpha is the exponent used by holder_seminorm.
struct GridSpec {
  double T = 1.0;
  double x_min = -1.0;
  double x_max = 1.0;
  int nt = 100;
  int nx = 100;
  double alpha = 0.5;

  double dt() const { return T / nt; }
  double dx() const { return (x_max - x_min) / nx; }
  double t(int j) const { return j == nt ? T : j * dt(); }
  double x(int k) const { return k == nx ? x_max : x_min + k * dx(); }

  void validate() const;  // throws ConfigError naming the offending member
  bool operator==(const GridSpec&) const = default;
};

// Scalar samples over the full grid, both jump states interleaved.
// Immutable after construction; every operation returns a fresh field.
class SlicedField {
 public:
  SlicedField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  double operator()(int j, int k, int n) const { return values_[index(j, k, n)]; }
  const std::vector<double>& values() const { return values_; }
  std::size_t index(int j, int k, int n) const {
    return (static_cast<std::size_t>(j) * (grid_.nx + 1) + k) * 2 + n;
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// Samples f(t_j, x_k, n) over the grid; rejects non-finite samples naming the node.
SlicedField field_from_function(const std::function<double(double, double, int)>& f,
                                const GridSpec& grid);
SlicedField zero_field(const GridSpec& grid);
SlicedField constant_field(const GridSpec& grid, double value);

// Second-order first x-derivative: central interior stencil, one-sided
// three-point stencils at x_min/x_max.  Requires nx >= 2.
SlicedField derivative_x(const SlicedField& u);

double sup_norm(const SlicedField& u);

// sup over nodes of exp(-beta*(T - t_j)) * |u|; beta >= 0.
double weighted_beta_norm(const SlicedField& u, double beta);

// Discrete anisotropic Hoelder seminorm with exponent grid.alpha and parabolic
// distance d((t1,x1),(t2,x2)) = sqrt|t1-t2| + |x1-x2|, taken per slice and
// maximised over the two slices.  The pair set is deterministic: all same-time
// pairs at dyadic spatial lags, all same-x pairs at dyadic time lags, plus a
// fixed-seed sample of mixed pairs, so repeated calls agree bit-for-bit.
double holder_seminorm(const SlicedField& u);

// sup_norm + holder_seminorm
double calpha_norm(const SlicedField& u);

// out(.,.,n) = u(.,.,1) - u(.,.,n); the n = 1 slice of the result is identically 0.
SlicedField n_difference(const SlicedField& u);

// Bilinear in (t,x) within the containing cell, jump state fixed.
// x is clamped to [x_min, x_max]; t outside [0, T] is rejected.
double interpolate(const SlicedField& u, double t, double x, int n);

// pointwise helpers (all verify matching grids)
SlicedField lincomb(double ca, const SlicedField& a, double cb, const SlicedField& b);
SlicedField scaled(const SlicedField& a, double c);
SlicedField map_values(const SlicedField& a, const std::function<double(double)>& f);

// CSV emission: '#'-prefixed metadata lines (key=value, one per line) carrying
// the grid so the file is self-describing, then "t,x,n,value" rows in (j,k,n)
// order at full double precision (17 significant digits round-trips exactly).
void write_field_csv(const SlicedField& u, const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& metadata = {});
SlicedField read_field_csv(const std::string& path,
                           std::vector<std::pair<std::string, std::string>>* metadata = nullptr);

}  // namespace jumpeq
