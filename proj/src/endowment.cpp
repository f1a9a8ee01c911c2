#include "jumpeq/endowment.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "jumpeq/errors.hpp"

namespace jumpeq {

double EndowmentTerm::eval(double x) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::tanh_step:
      return c * std::tanh(s * (x - x0));
    case Kind::gaussian_bump:
      return c * std::exp(-s * (x - x0) * (x - x0));
    case Kind::damped_cos:
      return c * std::cos(k * x) * std::exp(-s * x * x);
  }
  return 0.0;
}

double EndowmentTerm::support_scale() const {
  switch (kind) {
    case Kind::constant:
      return 0.0;
    case Kind::tanh_step:
      return std::abs(x0) + 3.0 / s;
    case Kind::gaussian_bump:
      return std::abs(x0) + 4.0 / std::sqrt(s);
    case Kind::damped_cos:
      return s > 0.0 ? 4.0 / std::sqrt(s) : 0.0;
  }
  return 0.0;
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string EndowmentTerm::describe() const {
  switch (kind) {
    case Kind::constant:
      return "constant(" + fmt_num(c) + ")";
    case Kind::tanh_step:
      return "tanh(" + fmt_num(c) + ", " + fmt_num(s) + ", " + fmt_num(x0) + ")";
    case Kind::gaussian_bump:
      return "gaussian_bump(" + fmt_num(c) + ", " + fmt_num(s) + ", " + fmt_num(x0) + ")";
    case Kind::damped_cos:
      return "damped_cos(" + fmt_num(c) + ", " + fmt_num(k) + ", " + fmt_num(s) + ")";
  }
  return "constant(0)";
}

double Endowment::operator()(double x, int n) const {
  if (n != 0 && n != 1) throw ConfigError("endowment: jump state must be 0 or 1");
  double v = 0.0;
  for (const EndowmentTerm& t : terms_[n]) v += t.eval(x);
  return v;
}

double Endowment::support_scale() const {
  double m = 0.0;
  for (const auto& side : terms_)
    for (const EndowmentTerm& t : side) m = std::max(m, t.support_scale());
  return m;
}

std::string Endowment::describe(int n) const {
  if (terms_[n].empty()) return "constant(0)";
  std::string out;
  for (std::size_t i = 0; i < terms_[n].size(); ++i) {
    if (i) out += " + ";
    out += terms_[n][i].describe();
  }
  return out;
}

Endowment Endowment::constant(double c0, double c1) {
  Endowment e;
  e.terms_[0].push_back({EndowmentTerm::Kind::constant, c0, 1.0, 0.0, 1.0});
  e.terms_[1].push_back({EndowmentTerm::Kind::constant, c1, 1.0, 0.0, 1.0});
  return e;
}

Endowment Endowment::from_terms(std::vector<EndowmentTerm> n0, std::vector<EndowmentTerm> n1) {
  Endowment e;
  e.terms_[0] = std::move(n0);
  e.terms_[1] = std::move(n1);
  return e;
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
};

double parse_number(Cursor& c, const char* term_name) {
  c.skip_ws();
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(c.s.substr(c.i), &used);
  } catch (const std::exception&) {
    throw ConfigError(std::string("endowment: expected a number in '") + term_name + "(...)'");
  }
  c.i += used;
  if (!std::isfinite(v))
    throw ConfigError(std::string("endowment: non-finite parameter in '") + term_name + "(...)'");
  return v;
}

std::vector<double> parse_args(Cursor& c, const char* term_name, std::size_t want) {
  c.skip_ws();
  if (c.i >= c.s.size() || c.s[c.i] != '(')
    throw ConfigError(std::string("endowment: expected '(' after '") + term_name + "'");
  ++c.i;
  std::vector<double> args;
  for (std::size_t a = 0; a < want; ++a) {
    args.push_back(parse_number(c, term_name));
    c.skip_ws();
    if (a + 1 < want) {
      if (c.i >= c.s.size() || c.s[c.i] != ',')
        throw ConfigError(std::string("endowment: '") + term_name + "' takes " +
                          std::to_string(want) + " arguments");
      ++c.i;
    }
  }
  c.skip_ws();
  if (c.i >= c.s.size() || c.s[c.i] != ')')
    throw ConfigError(std::string("endowment: missing ')' after '") + term_name + "(...'");
  ++c.i;
  return args;
}

std::vector<EndowmentTerm> parse_side(const std::string& text) {
  std::vector<EndowmentTerm> terms;
  Cursor c{text};
  if (c.done()) return terms;
  for (;;) {
    c.skip_ws();
    std::size_t start = c.i;
    while (c.i < c.s.size() &&
           (std::isalnum(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '_'))
      ++c.i;
    const std::string name = text.substr(start, c.i - start);
    EndowmentTerm t;
    if (name == "constant") {
      auto a = parse_args(c, "constant", 1);
      t = {EndowmentTerm::Kind::constant, a[0], 1.0, 0.0, 1.0};
    } else if (name == "tanh") {
      auto a = parse_args(c, "tanh", 3);
      if (!(a[1] > 0.0)) throw ConfigError("endowment: tanh slope s must be > 0");
      t = {EndowmentTerm::Kind::tanh_step, a[0], a[1], a[2], 1.0};
    } else if (name == "gaussian_bump") {
      auto a = parse_args(c, "gaussian_bump", 3);
      if (!(a[1] > 0.0)) throw ConfigError("endowment: gaussian_bump width s must be > 0");
      t = {EndowmentTerm::Kind::gaussian_bump, a[0], a[1], a[2], 1.0};
    } else if (name == "damped_cos") {
      auto a = parse_args(c, "damped_cos", 3);
      if (a[2] < 0.0) throw ConfigError("endowment: damped_cos damping s must be >= 0");
      t = {EndowmentTerm::Kind::damped_cos, a[0], 1.0, 0.0, a[1]};
      t.s = a[2];
    } else {
      throw ConfigError("endowment: unrecognized term '" + name + "'");
    }
    terms.push_back(t);
    if (c.done()) break;
    c.skip_ws();
    if (c.s[c.i] != '+')
      throw ConfigError("endowment: expected '+' between terms, found '" +
                        text.substr(c.i, 1) + "'");
    ++c.i;
  }
  return terms;
}

}  // namespace

Endowment Endowment::parse(const std::string& descriptor_n0, const std::string& descriptor_n1) {
  Endowment e;
  e.terms_[0] = parse_side(descriptor_n0);
  e.terms_[1] = parse_side(descriptor_n1);
  return e;
}

}  // namespace jumpeq
