#pragma once

#include <array>
#include <string>
#include <vector>

namespace jumpeq {

// Terminal endowments are finite sums of bounded smooth terms, parameterised
// independently per jump state.  Descriptor grammar (whitespace-insensitive):
//
//   expr  := term ( '+' term )*
//   term  := constant(c) | tanh(c, s, x0) | gaussian_bump(c, s, x0)
//          | damped_cos(c, k, s)
//
// with values  c,  c*tanh(s*(x-x0)),  c*exp(-s*(x-x0)^2),  c*cos(k*x)*exp(-s*x^2).
struct EndowmentTerm {
  enum class Kind { constant, tanh_step, gaussian_bump, damped_cos };
  Kind kind = Kind::constant;
  double c = 0.0, s = 1.0, x0 = 0.0, k = 1.0;

  double eval(double x) const;
  double support_scale() const;  // spatial extent used by the default-domain rule
  std::string describe() const;
};

class Endowment {
 public:
  Endowment() = default;

  double operator()(double x, int n) const;
  double support_scale() const;
  bool empty() const { return terms_[0].empty() && terms_[1].empty(); }
  const std::vector<EndowmentTerm>& terms(int n) const { return terms_[n]; }

  std::string describe(int n) const;

  // throws ConfigError naming the offending token
  static Endowment parse(const std::string& descriptor_n0, const std::string& descriptor_n1);

  static Endowment constant(double c0, double c1);
  static Endowment from_terms(std::vector<EndowmentTerm> n0, std::vector<EndowmentTerm> n1);

 private:
  std::array<std::vector<EndowmentTerm>, 2> terms_;
};

}  // namespace jumpeq
