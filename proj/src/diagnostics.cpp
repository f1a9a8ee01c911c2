#include "jumpeq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jumpeq/errors.hpp"

namespace jumpeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> stencil_derivative(const std::vector<double>& v, double dx) {
  const std::size_t m = v.size();
  std::vector<double> d(m);
  for (std::size_t k = 1; k + 1 < m; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * dx);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
  d[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * dx);
  return d;
}

std::vector<double> stencil_second_derivative(const std::vector<double>& v, double dx) {
  const std::size_t m = v.size();
  std::vector<double> d(m);
  for (std::size_t k = 1; k + 1 < m; ++k) d[k] = (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (dx * dx);
  // copying the neighbour under-estimates the boundary curvature, which is
  // the right direction for a from-below norm
  d[0] = d[1];
  d[m - 1] = d[m - 2];
  return d;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// spatial alpha-Holder seminorm sampled over dyadic lags
double spatial_seminorm(const std::vector<double>& v, double dx, double alpha) {
  double best = 0.0;
  for (std::size_t lag = 1; lag < v.size(); lag *= 2) {
    const double dist = std::pow(static_cast<double>(lag) * dx, alpha);
    for (std::size_t k = 0; k + lag < v.size(); ++k)
      best = std::max(best, std::fabs(v[k + lag] - v[k]) / dist);
  }
  return best;
}

double signed_sup(const SlicedField& u) {
  double m = -kInf;
  for (double v : u.values()) m = std::max(m, v);
  return m;
}

}  // namespace

TerminalNorms terminal_norms(const Endowment& g, const GridSpec& grid) {
  grid.validate();
  TerminalNorms out;
  double sup_g = 0.0, sup_gx = 0.0, sup_gxx = 0.0, semi_gxx = 0.0;
  for (int n = 0; n < 2; ++n) {
    std::vector<double> v(static_cast<std::size_t>(grid.nx) + 1);
    for (int k = 0; k <= grid.nx; ++k) v[static_cast<std::size_t>(k)] = g(grid.x(k), n);
    const std::vector<double> vx = stencil_derivative(v, grid.dx());
    const std::vector<double> vxx = stencil_second_derivative(v, grid.dx());
    sup_g = std::max(sup_g, max_abs(v));
    sup_gx = std::max(sup_gx, max_abs(vx));
    sup_gxx = std::max(sup_gxx, max_abs(vxx));
    semi_gxx = std::max(semi_gxx, spatial_seminorm(vxx, grid.dx(), grid.alpha));
  }
  out.sup = sup_g;
  out.c2alpha = sup_g + sup_gx + sup_gxx + semi_gxx;
  return out;
}

GrowthConstants growth_constants(double gamma, double mu, double T,
                                 const TerminalNorms& g_norms, double lambda_sup,
                                 double lambda_calpha) {
  if (!(gamma >= 0.0) || !(mu >= 0.0) || !(T >= 0.0))
    throw ConfigError("growth_constants: gamma, mu, T must be >= 0");
  if (!(g_norms.sup >= 0.0) || !(g_norms.c2alpha >= 0.0) || !(lambda_sup >= 0.0) ||
      !(lambda_calpha >= 0.0))
    throw ConfigError("growth_constants: norms must be >= 0");
  GrowthConstants c;
  c.M0 = gamma * g_norms.sup + 0.5 * T * lambda_sup * lambda_sup + mu * T;
  c.Malpha = gamma * g_norms.c2alpha + (T + 1.0) * (0.5 * lambda_calpha * lambda_calpha + mu);
  return c;
}

LipschitzEstimate lipschitz_estimate(double R, double T, double gamma, double mu,
                                     const TerminalNorms& g_norms, double alpha,
                                     double C) {
  if (!(R >= 0.0) || !(T >= 0.0)) throw ConfigError("lipschitz_estimate: R, T must be >= 0");
  if (!(C > 0.0)) throw ConfigError("lipschitz_estimate: C must be > 0");
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw ConfigError("lipschitz_estimate: alpha must lie in (0, 1]");
  LipschitzEstimate est;
  if (T == 0.0) {
    est.log_value = -kInf;
    est.log_log_value = -kInf;
    return est;
  }
  const double inner = 2.0 + 2.0 * gamma * g_norms.sup + T * R * R + 2.0 * mu * T;
  const double base = g_norms.c2alpha + (1.0 + T) * (1.0 + R * R);
  const double tail =
      std::log(C) + (1.0 + alpha) / (2.0 + alpha) * std::log(T) + (6.0 + 4.0 * alpha) * std::log(base);
  const double big = std::exp(inner);  // may overflow to +inf
  est.log_value = big + tail;
  est.log_log_value =
      std::isinf(big) ? inner : (big + tail > 0.0 ? std::log(big + tail) : -kInf);
  est.value = std::exp(est.log_value);
  est.overflow = std::isinf(est.value);
  return est;
}

double sequence_root(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ConfigError("sequence_root: alpha must lie in (0, 1)");
  const auto f = [alpha](double g) { return g - 1.0 - std::pow(g, alpha); };
  double lo = 1.0, hi = 4.0;
  while (f(hi) < 0.0) hi *= 2.0;  // root grows without bound as alpha -> 1
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sequence_bound(double A, double B, double alpha) {
  if (!(A >= 0.0) || !(B >= 0.0)) throw ConfigError("sequence_bound: A, B must be >= 0");
  const double g = sequence_root(alpha);
  return g * std::max(A, std::pow(B, 1.0 / (1.0 - alpha)));
}

double ExpCompositionReport::min_margin() const {
  return std::min(std::min(margin_sup, margin_seminorm),
                  std::min(margin_diff_sup, margin_diff_seminorm));
}

ExpCompositionReport verify_exp_composition(const SlicedField& u1, const SlicedField& u2,
                                            double gamma) {
  if (!(u1.grid() == u2.grid()))
    throw ConfigError("verify_exp_composition: fields live on different grids");
  if (!(gamma >= 0.0)) throw ConfigError("verify_exp_composition: gamma must be >= 0");
  const auto comp = [gamma](double v) { return std::exp(gamma * v); };
  const SlicedField e1 = map_values(u1, comp);
  const SlicedField e2 = map_values(u2, comp);
  const double s1 = signed_sup(u1), s2 = signed_sup(u2);
  const double D = std::exp(gamma * std::max(s1, s2));

  ExpCompositionReport rep;
  rep.margin_sup = std::min(std::exp(gamma * s1) - sup_norm(e1),
                            std::exp(gamma * s2) - sup_norm(e2));
  rep.margin_seminorm =
      std::min(gamma * std::exp(gamma * s1) * holder_seminorm(u1) - holder_seminorm(e1),
               gamma * std::exp(gamma * s2) * holder_seminorm(u2) - holder_seminorm(e2));
  const SlicedField du = lincomb(1.0, u2, -1.0, u1);
  const SlicedField de = lincomb(1.0, e2, -1.0, e1);
  rep.margin_diff_sup = gamma * D * sup_norm(du) - sup_norm(de);
  rep.margin_diff_seminorm =
      gamma * D * (holder_seminorm(du) + gamma * holder_seminorm(u2) * sup_norm(du)) -
      holder_seminorm(de);
  return rep;
}

}  // namespace jumpeq
