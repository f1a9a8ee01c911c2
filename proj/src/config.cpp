#include "jumpeq/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "jumpeq/errors.hpp"

namespace jumpeq {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an unsigned integer, got '" + value + "'");
  }
}

struct AgentDraft {
  std::optional<double> gamma;
  std::optional<std::string> endow_both;
  std::optional<std::string> endow_n0;
  std::optional<std::string> endow_n1;
  std::optional<std::string> name;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("config: duplicate key '" + key + "'");
  }
  return kv;
}

RunConfig config_from_key_values(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  std::optional<double> market_T, market_mu;
  std::optional<double> x_min, x_max, alpha;
  std::optional<int> nt, nx;
  std::map<int, AgentDraft> agents;

  for (const auto& [key, value] : kv) {
    if (key == "market.T") {
      market_T = parse_double(key, value);
    } else if (key == "market.mu") {
      market_mu = parse_double(key, value);
    } else if (key == "grid.nt") {
      nt = static_cast<int>(parse_int(key, value));
    } else if (key == "grid.nx") {
      nx = static_cast<int>(parse_int(key, value));
    } else if (key == "grid.x_min") {
      x_min = parse_double(key, value);
    } else if (key == "grid.x_max") {
      x_max = parse_double(key, value);
    } else if (key == "grid.alpha") {
      alpha = parse_double(key, value);
    } else if (key == "solver.scheme") {
      if (value == "implicit")
        cfg.solver.scheme = Scheme::implicit;
      else if (value == "cn")
        cfg.solver.scheme = Scheme::crank_nicolson;
      else
        throw ConfigError("config: solver.scheme must be 'implicit' or 'cn', got '" + value + "'");
    } else if (key == "solver.mode") {
      if (value == "newton")
        cfg.solver.mode = SemilinearMode::newton_per_step;
      else if (value == "picard")
        cfg.solver.mode = SemilinearMode::picard_global;
      else
        throw ConfigError("config: solver.mode must be 'newton' or 'picard', got '" + value + "'");
    } else if (key == "solver.tol") {
      cfg.solver.tol = parse_double(key, value);
    } else if (key == "solver.max_iter") {
      cfg.solver.max_iter = static_cast<int>(parse_int(key, value));
    } else if (key == "solver.damping") {
      cfg.solver.damping = parse_double(key, value);
    } else if (key == "mc.n_paths") {
      cfg.mc.n_paths = parse_int(key, value);
    } else if (key == "mc.n_steps") {
      cfg.mc.n_steps = parse_int(key, value);
    } else if (key == "mc.seed") {
      cfg.mc.seed = parse_u64(key, value);
    } else if (key == "mc.x0") {
      cfg.mc.x0 = parse_double(key, value);
    } else if (key == "output.dir") {
      cfg.out_dir = value;
    } else if (key.rfind("agent.", 0) == 0) {
      const std::string rest = key.substr(6);
      const std::size_t dot = rest.find('.');
      if (dot == std::string::npos || dot == 0)
        throw ConfigError("config: unknown key '" + key + "'");
      int idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoi(rest.substr(0, dot), &used);
        if (used != dot || idx < 0) throw std::invalid_argument("bad index");
      } catch (const std::exception&) {
        throw ConfigError("config: bad agent index in key '" + key + "'");
      }
      const std::string field = rest.substr(dot + 1);
      AgentDraft& draft = agents[idx];
      if (field == "gamma")
        draft.gamma = parse_double(key, value);
      else if (field == "endowment")
        draft.endow_both = value;
      else if (field == "endowment.n0")
        draft.endow_n0 = value;
      else if (field == "endowment.n1")
        draft.endow_n1 = value;
      else if (field == "name")
        draft.name = value;
      else
        throw ConfigError("config: unknown key '" + key + "'");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  if (!market_T) throw ConfigError("config: market.T is required");
  cfg.market.T = *market_T;
  cfg.market.mu = market_mu.value_or(0.0);

  if (agents.empty()) throw ConfigError("config: at least one agent.<i> block is required");
  int expected = 0;
  for (const auto& [idx, draft] : agents) {
    if (idx != expected)
      throw ConfigError("config: agent indices must be contiguous from 0, missing agent." +
                        std::to_string(expected));
    ++expected;
    AgentSpec spec;
    if (!draft.gamma) throw ConfigError("config: agent." + std::to_string(idx) + ".gamma is required");
    spec.gamma = *draft.gamma;
    if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma))
      throw ConfigError("config: agent." + std::to_string(idx) + ".gamma must be > 0");
    if (draft.endow_both && (draft.endow_n0 || draft.endow_n1))
      throw ConfigError("config: agent." + std::to_string(idx) +
                        ".endowment conflicts with the slice-specific endowment keys");
    if (draft.endow_both) {
      spec.endowment = Endowment::parse(*draft.endow_both, *draft.endow_both);
    } else if (draft.endow_n0 && draft.endow_n1) {
      spec.endowment = Endowment::parse(*draft.endow_n0, *draft.endow_n1);
    } else {
      throw ConfigError("config: agent." + std::to_string(idx) +
                        " needs endowment or both endowment.n0 and endowment.n1");
    }
    spec.name = draft.name.value_or("agent-" + std::to_string(idx));
    cfg.market.agents.push_back(std::move(spec));
  }

  cfg.grid.T = cfg.market.T;
  cfg.grid.nt = nt.value_or(200);
  cfg.grid.nx = nx.value_or(200);
  cfg.grid.alpha = alpha.value_or(0.5);
  if (x_min.has_value() != x_max.has_value())
    throw ConfigError("config: grid.x_min and grid.x_max must be given together");
  if (x_min) {
    cfg.grid.x_min = *x_min;
    cfg.grid.x_max = *x_max;
  } else {
    double scale = 0.0;
    for (const AgentSpec& a : cfg.market.agents)
      scale = std::max(scale, a.endowment.support_scale());
    const double st = std::sqrt(cfg.market.T);
    const double half = std::max(6.0 * st, scale + 4.0 * st);
    cfg.grid.x_min = -half;
    cfg.grid.x_max = half;
  }
  if (cfg.mc.n_steps == 0) cfg.mc.n_steps = cfg.grid.nt;

  cfg.validate();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  return config_from_key_values(parse_key_values(text));
}

void RunConfig::validate() const {
  grid.validate();
  market.validate(grid);
  if (!(solver.tol > 0.0)) throw ConfigError("config: solver.tol must be > 0");
  if (solver.max_iter < 1) throw ConfigError("config: solver.max_iter must be >= 1");
  if (!(solver.damping > 0.0) || solver.damping > 1.0)
    throw ConfigError("config: solver.damping must lie in (0, 1]");
  mc.validate();
  if (out_dir.empty()) throw ConfigError("config: output.dir must not be empty");
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_model_text(const RunConfig& config) {
  std::ostringstream out;
  out << "market.T = " << fmt(config.market.T) << "\n";
  out << "market.mu = " << fmt(config.market.mu) << "\n";
  for (std::size_t i = 0; i < config.market.agents.size(); ++i) {
    const AgentSpec& a = config.market.agents[i];
    out << "agent." << i << ".gamma = " << fmt(a.gamma) << "\n";
    out << "agent." << i << ".endowment.n0 = " << a.endowment.describe(0) << "\n";
    out << "agent." << i << ".endowment.n1 = " << a.endowment.describe(1) << "\n";
  }
  out << "grid.nt = " << config.grid.nt << "\n";
  out << "grid.nx = " << config.grid.nx << "\n";
  out << "grid.x_min = " << fmt(config.grid.x_min) << "\n";
  out << "grid.x_max = " << fmt(config.grid.x_max) << "\n";
  out << "grid.alpha = " << fmt(config.grid.alpha) << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = canonical_model_text(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

}  // namespace jumpeq
