#include "jumpeq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "jumpeq/errors.hpp"
#include "jumpeq/rng.hpp"

namespace jumpeq {

namespace {

constexpr std::uint64_t kPurposeIncrement = 0;
constexpr std::uint64_t kPurposeJumpTime = 1;

// contiguous path ranges; each task writes disjoint index ranges, so the
// result is identical to the sequential run regardless of scheduling
template <typename Fn>
void for_each_path_range(std::int64_t n_paths, const Fn& run_range) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::int64_t tasks = std::min<std::int64_t>(hw, std::max<std::int64_t>(1, n_paths / 1024));
  if (tasks <= 1) {
    run_range(0, n_paths);
    return;
  }
  std::vector<std::future<void>> futs;
  futs.reserve(static_cast<std::size_t>(tasks));
  const std::int64_t chunk = (n_paths + tasks - 1) / tasks;
  for (std::int64_t b = 0; b < n_paths; b += chunk) {
    const std::int64_t e = std::min(n_paths, b + chunk);
    futs.push_back(std::async(std::launch::async, [&run_range, b, e] { run_range(b, e); }));
  }
  for (auto& f : futs) f.get();
}

void check_paths_match_grid(const PathBatch& paths, const GridSpec& grid, const char* op) {
  if (paths.T != grid.T)
    throw ConfigError(std::string(op) + ": path horizon does not match the field grid");
  if (paths.n_steps != grid.nt)
    throw ConfigError(std::string(op) + ": paths must step on the field time grid");
}

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw ConfigError("mc.n_paths must be >= 1");
  if (n_steps < 1) throw ConfigError("mc.n_steps must be >= 1");
  if (!std::isfinite(x0)) throw ConfigError("mc.x0 must be finite");
}

PathBatch simulate_paths(double mu, double T, const SimConfig& config) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("simulate_paths: mu must be >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("simulate_paths: T must be > 0");
  config.validate();

  PathBatch batch;
  batch.T = T;
  batch.x0 = config.x0;
  batch.n_paths = config.n_paths;
  batch.n_steps = config.n_steps;
  batch.increments.resize(static_cast<std::size_t>(config.n_paths * config.n_steps));
  batch.tau.resize(static_cast<std::size_t>(config.n_paths));

  const CounterRng rng(config.seed, kStreamKey);
  const double sdt = std::sqrt(T / static_cast<double>(config.n_steps));
  const std::int64_t n_steps = config.n_steps;
  for_each_path_range(config.n_paths, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      for (std::int64_t m = 0; m < n_steps; ++m) {
        const auto z = rng.normals(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(m),
                                   kPurposeIncrement);
        batch.increments[static_cast<std::size_t>(i * n_steps + m)] = sdt * z[0];
      }
      const double u = rng.uniform_positive(static_cast<std::uint64_t>(i), 0, kPurposeJumpTime);
      batch.tau[static_cast<std::size_t>(i)] =
          mu > 0.0 ? -std::log(u) / mu : std::numeric_limits<double>::infinity();
    }
  });
  return batch;
}

std::vector<PathTerminal> terminal_summaries(const SlicedField& lambda,
                                             const SlicedField& strategy,
                                             const AgentSpec& agent, const PathBatch& paths) {
  if (!(lambda.grid() == strategy.grid()))
    throw ConfigError("terminal_summaries: lambda and strategy live on different grids");
  check_paths_match_grid(paths, lambda.grid(), "terminal_summaries");
  const double dt = paths.dt();
  const double gamma = agent.gamma;
  const Endowment& g = agent.endowment;

  std::vector<PathTerminal> out(static_cast<std::size_t>(paths.n_paths));
  for_each_path_range(paths.n_paths, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      double wealth = 0.0;
      double brownian = paths.x0;
      for (std::int64_t m = 0; m < paths.n_steps; ++m) {
        const double t = static_cast<double>(m) * dt;
        const int n_pre = paths.n_before(i, t);
        const double pi_v = interpolate(strategy, t, brownian, n_pre);
        const double lam_v = interpolate(lambda, t, brownian, n_pre);
        const double db = paths.increment(i, m);
        wealth += pi_v * (lam_v * dt + db);
        brownian += db;
      }
      PathTerminal& term = out[static_cast<std::size_t>(i)];
      term.b_t = brownian;
      term.n_t = paths.n_terminal(i);
      term.x_t = wealth;
      term.utility = -std::exp(-gamma * (wealth + g(brownian, term.n_t)));
    }
  });
  return out;
}

std::vector<double> utility_samples(const SlicedField& lambda, const SlicedField& strategy,
                                    const AgentSpec& agent, const PathBatch& paths) {
  const std::vector<PathTerminal> terms = terminal_summaries(lambda, strategy, agent, paths);
  std::vector<double> out(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) out[i] = terms[i].utility;
  return out;
}

UtilityEstimate estimate_from_samples(const std::vector<double>& samples) {
  if (samples.empty()) throw ConfigError("estimate_from_samples: empty sample set");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = samples.size() > 1 ? var / (n - 1.0) : 0.0;
  UtilityEstimate est;
  est.mean = mean;
  est.stderr_mean = std::sqrt(var / n);
  return est;
}

UtilityEstimate wealth_and_utility(const SlicedField& lambda, const SlicedField& strategy,
                                   const AgentSpec& agent, const PathBatch& paths) {
  return estimate_from_samples(utility_samples(lambda, strategy, agent, paths));
}

OptimalityReport verify_optimality(const AgentSolution& solution, const SlicedField& lambda,
                                   const AgentSpec& agent, const PathBatch& paths,
                                   const std::vector<SlicedField>& perturbations, double eps) {
  if (!(eps > 0.0)) throw ConfigError("verify_optimality: eps must be > 0");
  const std::vector<double> base = utility_samples(lambda, solution.pi, agent, paths);
  const UtilityEstimate base_est = estimate_from_samples(base);

  OptimalityReport rep;
  rep.base_mean = base_est.mean;
  rep.base_stderr = base_est.stderr_mean;
  rep.eps = eps;
  for (const SlicedField& phi : perturbations) {
    const SlicedField perturbed = lincomb(1.0, solution.pi, eps, phi);
    const std::vector<double> pert = utility_samples(lambda, perturbed, agent, paths);
    std::vector<double> diff(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) diff[i] = base[i] - pert[i];
    const UtilityEstimate d = estimate_from_samples(diff);
    PerturbationCheck check;
    check.perturbed_mean = base_est.mean - d.mean;
    check.diff_mean = d.mean;
    check.diff_stderr = d.stderr_mean;
    check.quad_coeff = d.mean / (eps * eps);
    check.passed = d.mean >= -3.0 * d.stderr_mean;
    rep.all_passed = rep.all_passed && check.passed;
    rep.checks.push_back(check);
  }
  return rep;
}

RisklessReport riskless_position(const SlicedField& strategy, const SlicedField& lambda,
                                 const PathBatch& paths) {
  if (!(strategy.grid() == lambda.grid()))
    throw ConfigError("riskless_position: strategy and lambda live on different grids");
  check_paths_match_grid(paths, strategy.grid(), "riskless_position");
  const GridSpec& grid = strategy.grid();
  const double dt = paths.dt();

  std::vector<double> worst_err(static_cast<std::size_t>(paths.n_paths), 0.0);
  std::vector<double> worst_rho(static_cast<std::size_t>(paths.n_paths), 0.0);
  for_each_path_range(paths.n_paths, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      double s = 0.0;       // traded asset started at zero
      double gains = 0.0;   // Euler integral of pi dS
      double brownian = paths.x0;
      double max_err = 0.0, max_rho = 0.0;
      for (std::int64_t m = 0; m <= paths.n_steps; ++m) {
        const double t = m == paths.n_steps ? grid.T : static_cast<double>(m) * dt;
        const int n_pre = paths.n_before(i, t);
        const double pi_v = interpolate(strategy, t, brownian, n_pre);
        const double rho = gains - pi_v * s;
        max_err = std::max(max_err, std::fabs(pi_v * s + rho - gains));
        max_rho = std::max(max_rho, std::fabs(rho));
        if (m == paths.n_steps) break;
        const double lam_v = interpolate(lambda, t, brownian, n_pre);
        const double db = paths.increment(i, m);
        const double ds = lam_v * dt + db;
        s += ds;
        gains += pi_v * ds;
        brownian += db;
      }
      worst_err[static_cast<std::size_t>(i)] = max_err;
      worst_rho[static_cast<std::size_t>(i)] = max_rho;
    }
  });
  RisklessReport rep;
  for (double v : worst_err) rep.max_identity_error = std::max(rep.max_identity_error, v);
  for (double v : worst_rho) rep.max_abs_rho = std::max(rep.max_abs_rho, v);
  return rep;
}

ClearingPathReport verify_clearing_on_paths(const EquilibriumResult& result,
                                            const PathBatch& paths) {
  if (result.agent_solutions.empty())
    throw ConfigError("verify_clearing_on_paths: result carries no agent solutions");
  const GridSpec& grid = result.agent_solutions.front().pi.grid();
  check_paths_match_grid(paths, grid, "verify_clearing_on_paths");
  const double dt = paths.dt();

  std::vector<double> worst(static_cast<std::size_t>(paths.n_paths), 0.0);
  for_each_path_range(paths.n_paths, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      double brownian = paths.x0;
      double max_abs = 0.0;
      for (std::int64_t m = 0; m < paths.n_steps; ++m) {
        const double t = static_cast<double>(m) * dt;
        const int n_pre = paths.n_before(i, t);
        double total = 0.0;
        for (const AgentSolution& s : result.agent_solutions)
          total += interpolate(s.pi, t, brownian, n_pre);
        max_abs = std::max(max_abs, std::fabs(total));
        brownian += paths.increment(i, m);
      }
      worst[static_cast<std::size_t>(i)] = max_abs;
    }
  });
  ClearingPathReport rep;
  for (double v : worst) rep.max_abs = std::max(rep.max_abs, v);
  return rep;
}

JumpStats jump_statistics(const PathBatch& paths) {
  JumpStats stats;
  for (std::int64_t i = 0; i < paths.n_paths; ++i) stats.jumps += paths.n_terminal(i);
  const double n = static_cast<double>(paths.n_paths);
  stats.fraction = static_cast<double>(stats.jumps) / n;
  stats.stderr_fraction = std::sqrt(stats.fraction * (1.0 - stats.fraction) / n);
  return stats;
}

}  // namespace jumpeq
