#pragma once

// Computable forms of the quantitative estimates behind the solver: growth
// constants for the agent equation, the local Lipschitz shape L(R) of the
// excess-demand map, the recursive sequence bound, and the explicit-constant
// bounds for the exponential composition map u -> e^{gamma u}.

#include "jumpeq/endowment.hpp"
#include "jumpeq/grid_field.hpp"

namespace jumpeq {

struct GrowthConstants {
  double M0 = 0.0;
  double Malpha = 0.0;
};

// Discrete norms of a terminal condition sampled on the spatial nodes of a
// grid: sup |g| over both slices, and the C^{2+alpha} norm assembled from the
// sup norms of g, g_x, g_xx plus the alpha-Holder seminorm of g_xx.  Stencil
// derivatives sample the continuum norm from below.
struct TerminalNorms {
  double sup = 0.0;
  double c2alpha = 0.0;
};

TerminalNorms terminal_norms(const Endowment& g, const GridSpec& grid);

// M0 = gamma*||g||_0 + T/2*||lambda||_0^2 + mu*T
// Malpha = gamma*||g||_{2+alpha} + (T+1)*(||lambda||_alpha^2/2 + mu)
GrowthConstants growth_constants(double gamma, double mu, double T,
                                 const TerminalNorms& g_norms, double lambda_sup,
                                 double lambda_calpha);

// L(R) = C * T^{(1+a)/(2+a)} * e^{e^{2 + 2 gamma ||g||_0 + T R^2 + 2 mu T}}
//          * (||g||_{2+a} + (1+T)(1+R^2))^{6+4a}
// evaluated in log space.  When the double exponential exceeds the
// representable range, value is +infinity, overflow is set, and the log and
// log-log of L(R) are still reported (the latter is finite in practice).
struct LipschitzEstimate {
  double value = 0.0;
  bool overflow = false;
  double log_value = 0.0;
  double log_log_value = 0.0;
};

LipschitzEstimate lipschitz_estimate(double R, double T, double gamma, double mu,
                                     const TerminalNorms& g_norms, double alpha,
                                     double C);

// Unique root > 1 of g = 1 + g^alpha, alpha in (0,1).
double sequence_root(double alpha);

// Bound g(alpha) * max(A, B^{1/(1-alpha)}) dominating limsup x_n for any
// sequence with x_{n+1} <= A + B x_n^alpha.
double sequence_bound(double A, double B, double alpha);

// Signed margins RHS - LHS of the four composition bounds, with
// D = e^{gamma max(sup u1, sup u2)} and E u = e^{gamma u}:
//   1. ||E u||_0        <= e^{gamma sup u}            (worst field reported)
//   2. [E u]_a          <= gamma e^{gamma sup u}[u]_a (worst field reported)
//   3. ||E u2 - E u1||_0 <= gamma D ||u2 - u1||_0
//   4. [E u2 - E u1]_a  <= gamma D ([u2 - u1]_a + gamma [u2]_a ||u2 - u1||_0)
// All four are exact pointwise inequalities, so discrete margins can dip
// below zero only by rounding.
struct ExpCompositionReport {
  double margin_sup = 0.0;
  double margin_seminorm = 0.0;
  double margin_diff_sup = 0.0;
  double margin_diff_seminorm = 0.0;
  double min_margin() const;
};

ExpCompositionReport verify_exp_composition(const SlicedField& u1,
                                            const SlicedField& u2, double gamma);

}  // namespace jumpeq
