#include "jumpeq/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "jumpeq/errors.hpp"

namespace jumpeq {

void GridSpec::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("grid.T must be finite and > 0");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw ConfigError("grid.x_min must be < grid.x_max (both finite)");
  if (nt < 1) throw ConfigError("grid.nt must be >= 1");
  if (nx < 1) throw ConfigError("grid.nx must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("grid.alpha must lie in (0, 1)");
}

SlicedField::SlicedField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  const std::size_t want =
      static_cast<std::size_t>(grid_.nt + 1) * (grid_.nx + 1) * 2;
  if (values_.size() != want)
    throw ConfigError("SlicedField: values size does not match grid shape");
}

SlicedField field_from_function(const std::function<double(double, double, int)>& f,
                                const GridSpec& grid) {
  grid.validate();
  std::vector<double> v(static_cast<std::size_t>(grid.nt + 1) * (grid.nx + 1) * 2);
  std::size_t idx = 0;
  for (int j = 0; j <= grid.nt; ++j) {
    const double t = grid.t(j);
    for (int k = 0; k <= grid.nx; ++k) {
      const double x = grid.x(k);
      for (int n = 0; n < 2; ++n) {
        const double val = f(t, x, n);
        if (!std::isfinite(val)) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "field_from_function: non-finite sample at (t=%.6g, x=%.6g, n=%d)",
                        t, x, n);
          throw ConfigError(buf);
        }
        v[idx++] = val;
      }
    }
  }
  return SlicedField(grid, std::move(v));
}

SlicedField zero_field(const GridSpec& grid) { return constant_field(grid, 0.0); }

SlicedField constant_field(const GridSpec& grid, double value) {
  grid.validate();
  std::vector<double> v(static_cast<std::size_t>(grid.nt + 1) * (grid.nx + 1) * 2, value);
  return SlicedField(grid, std::move(v));
}

SlicedField derivative_x(const SlicedField& u) {
  const GridSpec& g = u.grid();
  if (g.nx < 2) throw ConfigError("derivative_x: grid too small for the stencil (nx < 2)");
  const double idx2 = 1.0 / (2.0 * g.dx());
  std::vector<double> v(u.values().size());
  for (int j = 0; j <= g.nt; ++j)
    for (int n = 0; n < 2; ++n) {
      // one-sided second-order stencils at the boundary columns
      v[u.index(j, 0, n)] =
          (-3.0 * u(j, 0, n) + 4.0 * u(j, 1, n) - u(j, 2, n)) * idx2;
      for (int k = 1; k < g.nx; ++k)
        v[u.index(j, k, n)] = (u(j, k + 1, n) - u(j, k - 1, n)) * idx2;
      v[u.index(j, g.nx, n)] =
          (3.0 * u(j, g.nx, n) - 4.0 * u(j, g.nx - 1, n) + u(j, g.nx - 2, n)) * idx2;
    }
  return SlicedField(g, std::move(v));
}

double sup_norm(const SlicedField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double weighted_beta_norm(const SlicedField& u, double beta) {
  if (!(beta >= 0.0)) throw ConfigError("weighted_beta_norm: beta must be >= 0");
  const GridSpec& g = u.grid();
  double m = 0.0;
  for (int j = 0; j <= g.nt; ++j) {
    const double w = std::exp(-beta * (g.T - g.t(j)));
    double lvl = 0.0;
    for (int k = 0; k <= g.nx; ++k)
      for (int n = 0; n < 2; ++n) lvl = std::max(lvl, std::abs(u(j, k, n)));
    m = std::max(m, w * lvl);
  }
  return m;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr int kMixedPairsPerSlice = 100000;

}  // namespace

double holder_seminorm(const SlicedField& u) {
  const GridSpec& g = u.grid();
  const double a = g.alpha;
  double best = 0.0;
  for (int n = 0; n < 2; ++n) {
    // same-time pairs at dyadic spatial lags
    for (int L = 1; L <= g.nx; L *= 2) {
      const double d = std::pow(static_cast<double>(L) * g.dx(), a);
      for (int j = 0; j <= g.nt; ++j)
        for (int k = 0; k + L <= g.nx; ++k) {
          const double r = std::abs(u(j, k + L, n) - u(j, k, n)) / d;
          if (r > best) best = r;
        }
    }
    // same-x pairs at dyadic time lags
    for (int M = 1; M <= g.nt; M *= 2) {
      const double d = std::pow(std::sqrt(static_cast<double>(M) * g.dt()), a);
      for (int j = 0; j + M <= g.nt; ++j)
        for (int k = 0; k <= g.nx; ++k) {
          const double r = std::abs(u(j + M, k, n) - u(j, k, n)) / d;
          if (r > best) best = r;
        }
    }
    // fixed-seed mixed sample; identical pair set for every field on this shape
    std::uint64_t state = 0x4A51464C44533031ull ^ (static_cast<std::uint64_t>(n) << 32);
    for (int it = 0; it < kMixedPairsPerSlice; ++it) {
      const int j1 = static_cast<int>(splitmix64(state) % (g.nt + 1));
      const int k1 = static_cast<int>(splitmix64(state) % (g.nx + 1));
      const int j2 = static_cast<int>(splitmix64(state) % (g.nt + 1));
      const int k2 = static_cast<int>(splitmix64(state) % (g.nx + 1));
      if (j1 == j2 && k1 == k2) continue;
      const double d = std::sqrt(std::abs(g.t(j1) - g.t(j2))) + std::abs(g.x(k1) - g.x(k2));
      const double r = std::abs(u(j1, k1, n) - u(j2, k2, n)) / std::pow(d, a);
      if (r > best) best = r;
    }
  }
  return best;
}

double calpha_norm(const SlicedField& u) { return sup_norm(u) + holder_seminorm(u); }

SlicedField n_difference(const SlicedField& u) {
  const GridSpec& g = u.grid();
  std::vector<double> v(u.values().size());
  for (int j = 0; j <= g.nt; ++j)
    for (int k = 0; k <= g.nx; ++k) {
      v[u.index(j, k, 0)] = u(j, k, 1) - u(j, k, 0);
      v[u.index(j, k, 1)] = 0.0;
    }
  return SlicedField(g, std::move(v));
}

double interpolate(const SlicedField& u, double t, double x, int n) {
  const GridSpec& g = u.grid();
  if (n != 0 && n != 1) throw ConfigError("interpolate: n must be 0 or 1");
  if (!(t >= 0.0 && t <= g.T)) throw ConfigError("interpolate: t outside [0, T]");
  x = std::min(std::max(x, g.x_min), g.x_max);

  // fractional indices, snapped to the node when within rounding distance so
  // node queries reproduce stored values exactly
  auto split = [](double s, int cells) {
    int i = static_cast<int>(std::floor(s));
    if (i < 0) i = 0;
    if (i > cells - 1) i = cells - 1;
    double w = s - i;
    if (w < 1e-9) w = 0.0;
    if (w > 1.0 - 1e-9) w = 1.0;
    return std::pair<int, double>(i, w);
  };
  const auto [j, wt] = split(t / g.dt(), g.nt);
  const auto [k, wx] = split((x - g.x_min) / g.dx(), g.nx);

  const double u00 = u(j, k, n), u01 = u(j, k + 1, n);
  const double u10 = u(j + 1, k, n), u11 = u(j + 1, k + 1, n);
  const double lo = u00 + wx * (u01 - u00);
  const double hi = u10 + wx * (u11 - u10);
  return lo + wt * (hi - lo);
}

namespace {

void check_same_grid(const SlicedField& a, const SlicedField& b, const char* op) {
  if (!(a.grid() == b.grid()))
    throw ConfigError(std::string(op) + ": fields live on different grids");
}

}  // namespace

SlicedField lincomb(double ca, const SlicedField& a, double cb, const SlicedField& b) {
  check_same_grid(a, b, "lincomb");
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = ca * a.values()[i] + cb * b.values()[i];
  return SlicedField(a.grid(), std::move(v));
}

SlicedField scaled(const SlicedField& a, double c) {
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a.values()[i];
  return SlicedField(a.grid(), std::move(v));
}

SlicedField map_values(const SlicedField& a, const std::function<double(double)>& f) {
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(a.values()[i]);
  return SlicedField(a.grid(), std::move(v));
}

void write_field_csv(const SlicedField& u, const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_field_csv: cannot open '" + path + "' for writing");
  const GridSpec& g = u.grid();
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "# version=" << kVersion << "\n";
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  out << "# grid.T=" << fmt(g.T) << "\n# grid.x_min=" << fmt(g.x_min)
      << "\n# grid.x_max=" << fmt(g.x_max) << "\n# grid.nt=" << g.nt
      << "\n# grid.nx=" << g.nx << "\n# grid.alpha=" << fmt(g.alpha) << "\n";
  out << "t,x,n,value\n";
  for (int j = 0; j <= g.nt; ++j)
    for (int k = 0; k <= g.nx; ++k)
      for (int n = 0; n < 2; ++n)
        out << fmt(g.t(j)) << ',' << fmt(g.x(k)) << ',' << n << ','
            << fmt(u(j, k, n)) << "\n";
  if (!out) throw ConfigError("write_field_csv: write failed for '" + path + "'");
}

SlicedField read_field_csv(const std::string& path,
                           std::vector<std::pair<std::string, std::string>>* metadata) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_field_csv: cannot open '" + path + "'");
  GridSpec g;
  bool have_T = false, have_xmin = false, have_xmax = false, have_nt = false,
       have_nx = false, have_alpha = false;
  std::string line;
  std::vector<double> values;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = body.substr(0, eq);
      std::string val = body.substr(eq + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key == "grid.T") { g.T = std::stod(val); have_T = true; }
      else if (key == "grid.x_min") { g.x_min = std::stod(val); have_xmin = true; }
      else if (key == "grid.x_max") { g.x_max = std::stod(val); have_xmax = true; }
      else if (key == "grid.nt") { g.nt = std::stoi(val); have_nt = true; }
      else if (key == "grid.nx") { g.nx = std::stoi(val); have_nx = true; }
      else if (key == "grid.alpha") { g.alpha = std::stod(val); have_alpha = true; }
      else if (metadata) metadata->emplace_back(key, val);
      continue;
    }
    if (!header_seen) {  // "t,x,n,value" column header
      header_seen = true;
      continue;
    }
    // only the value column matters; coordinates are implied by row order
    const std::size_t p3 = line.rfind(',');
    if (p3 == std::string::npos)
      throw ConfigError("read_field_csv: malformed row in '" + path + "'");
    values.push_back(std::stod(line.substr(p3 + 1)));
  }
  if (!(have_T && have_xmin && have_xmax && have_nt && have_nx && have_alpha))
    throw ConfigError("read_field_csv: missing grid metadata in '" + path + "'");
  const std::size_t want = static_cast<std::size_t>(g.nt + 1) * (g.nx + 1) * 2;
  if (values.size() != want)
    throw ConfigError("read_field_csv: row count does not match grid in '" + path + "'");
  return SlicedField(g, std::move(values));
}

}  // namespace jumpeq
