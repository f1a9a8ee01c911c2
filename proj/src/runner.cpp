#include "jumpeq/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "jumpeq/diagnostics.hpp"
#include "jumpeq/errors.hpp"
#include "jumpeq/montecarlo.hpp"

namespace jumpeq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::vector<std::pair<std::string, std::string>> field_meta(const RunConfig& config,
                                                            const std::string& content) {
  return {{"content", content}, {"config_hash", config_hash_hex(config)}};
}

void write_agent_fields(const RunConfig& config, const std::vector<AgentSolution>& sols) {
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const std::string stem = config.out_dir + "/agent_" + std::to_string(i) + "_";
    auto meta = [&](const char* what) {
      auto m = field_meta(config, "agent_" + std::to_string(i) + "_" + what);
      m.emplace_back("agent", config.market.agents[i].name);
      return m;
    };
    write_field_csv(sols[i].u, stem + "u.csv", meta("u"));
    write_field_csv(sols[i].u_x, stem + "u_x.csv", meta("u_x"));
    write_field_csv(sols[i].pi, stem + "pi.csv", meta("pi"));
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

const char* scheme_name(Scheme s) { return s == Scheme::implicit ? "implicit" : "cn"; }
const char* mode_name(SemilinearMode m) {
  return m == SemilinearMode::newton_per_step ? "newton" : "picard";
}

// a verification check with its measured value and the bound it must meet
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

template <typename Body>
int guarded(std::string* error, const Body& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    if (error) *error = e.what();
    return kExitConfig;
  } catch (const SolverError& e) {
    if (error) *error = e.what();
    return kExitSolver;
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return kExitSolver;
  }
}

}  // namespace

int run_solve(const RunConfig& config, SummaryMap* summary, std::string* error) {
  return guarded(error, [&] {
    config.validate();
    ensure_dir(config.out_dir);
    const SlicedField lambda = zero_field(config.grid);
    const double pde_tol = std::max(1e-13, 0.01 * config.solver.tol);

    std::vector<AgentSolution> sols;
    sols.reserve(config.market.agents.size());
    for (const AgentSpec& agent : config.market.agents)
      sols.push_back(solve_agent_pdde(lambda, agent, config.market.mu, config.grid, pde_tol,
                                      config.solver.scheme, config.solver.mode));

    write_field_csv(lambda, config.out_dir + "/lambda.csv", field_meta(config, "lambda"));
    write_agent_fields(config, sols);
    if (summary) {
      (*summary)["agents"] = static_cast<double>(sols.size());
      (*summary)["lambda_sup"] = sup_norm(lambda);
      for (std::size_t i = 0; i < sols.size(); ++i) {
        (*summary)["agent_" + std::to_string(i) + "_u_sup"] = sup_norm(sols[i].u);
        (*summary)["agent_" + std::to_string(i) + "_pi_sup"] = sup_norm(sols[i].pi);
      }
    }
    return kExitOk;
  });
}

int run_equilibrate(const RunConfig& config, SummaryMap* summary, std::string* error) {
  return guarded(error, [&] {
    config.validate();
    ensure_dir(config.out_dir);
    const EquilibriumResult result = find_equilibrium(config.market, config.grid, config.solver);
    const SmallnessReport small =
        smallness_diagnostics(config.market, config.grid, config.solver, &result);
    const double gbar = gamma_bar(config.market.agents);

    write_field_csv(result.lambda_star, config.out_dir + "/lambda_star.csv",
                    field_meta(config, "lambda_star"));
    write_agent_fields(config, result.agent_solutions);

    {
      std::ofstream out(config.out_dir + "/iterations.csv");
      if (!out) throw ConfigError("cannot open '" + config.out_dir + "/iterations.csv'");
      out << "# version=" << kVersion << "\n# config_hash=" << config_hash_hex(config) << "\n";
      out << "iter,sup_residual,holder_residual,ratio,clearing_residual\n";
      for (std::size_t k = 0; k < result.residual_history.size(); ++k) {
        const double ratio =
            k == 0 ? std::nan("") : result.contraction_ratios[k - 1];
        out << (k + 1) << ',' << fmt(result.residual_history[k]) << ','
            << fmt(result.residual_history_calpha[k]) << ',' << fmt(ratio) << ','
            << fmt(result.residual_history[k] / gbar) << "\n";
      }
      if (!out) throw ConfigError("write failed for '" + config.out_dir + "/iterations.csv'");
    }

    double max_ratio = 0.0;
    for (double r : result.contraction_ratios) max_ratio = std::max(max_ratio, r);
    const double residual_final =
        result.residual_history.empty() ? 0.0 : result.residual_history.back();

    json j;
    j["version"] = kVersion;
    j["config_hash"] = config_hash_hex(config);
    j["converged"] = result.converged;
    j["diverged"] = result.diverged;
    j["iterations"] = result.iterations;
    j["residual_final"] = residual_final;
    j["lambda_sup"] = sup_norm(result.lambda_star);
    j["clearing_residual"] = result.clearing_residual;
    j["gamma_bar"] = gbar;
    j["R0"] = small.R0;
    j["max_contraction_ratio"] = max_ratio;
    j["max_iterate_calpha"] = small.max_iterate_calpha;
    j["iterates_in_ball"] = small.iterates_in_ball;
    j["tol"] = config.solver.tol;
    j["damping"] = config.solver.damping;
    j["scheme"] = scheme_name(config.solver.scheme);
    j["mode"] = mode_name(config.solver.mode);
    write_json_file(config.out_dir + "/summary.json", j);

    if (summary) {
      (*summary)["converged"] = result.converged ? 1.0 : 0.0;
      (*summary)["diverged"] = result.diverged ? 1.0 : 0.0;
      (*summary)["iterations"] = static_cast<double>(result.iterations);
      (*summary)["residual_final"] = residual_final;
      (*summary)["lambda_sup"] = sup_norm(result.lambda_star);
      (*summary)["clearing_residual"] = result.clearing_residual;
      (*summary)["gamma_bar"] = gbar;
      (*summary)["R0"] = small.R0;
      (*summary)["max_contraction_ratio"] = max_ratio;
    }
    if (!result.converged) {
      if (error)
        *error = result.diverged
                     ? "equilibrium iteration diverged (iterate norm exceeded the guard)"
                     : "equilibrium iteration did not converge within solver.max_iter";
      return kExitNotConverged;
    }
    return kExitOk;
  });
}

int run_verify(const RunConfig& config, const std::string& result_dir, SummaryMap* summary,
               std::string* error) {
  return guarded(error, [&] {
    config.validate();
    if (config.mc.n_steps != config.grid.nt)
      throw ConfigError(
          "verify: mc.n_steps must equal grid.nt so strategies are sampled at time nodes");
    ensure_dir(config.out_dir);

    const json stored = load_json_file(result_dir + "/summary.json");
    if (!stored.value("converged", false))
      throw ConfigError("verify: '" + result_dir + "' does not hold a converged equilibrium");
    const std::string stored_hash = stored.value("config_hash", "");
    if (stored_hash != config_hash_hex(config))
      throw ConfigError("verify: config does not match the results in '" + result_dir +
                        "' (config_hash " + config_hash_hex(config) + " vs stored " +
                        stored_hash + ")");
    const double clearing_stored = stored.value("clearing_residual", 0.0);

    const SlicedField lambda = read_field_csv(result_dir + "/lambda_star.csv", nullptr);
    if (!(lambda.grid() == config.grid))
      throw ConfigError("verify: stored lambda_star grid does not match the configuration");
    std::vector<AgentSolution> sols;
    for (std::size_t i = 0; i < config.market.agents.size(); ++i) {
      const std::string stem = result_dir + "/agent_" + std::to_string(i) + "_";
      SlicedField u = read_field_csv(stem + "u.csv", nullptr);
      SlicedField u_x = read_field_csv(stem + "u_x.csv", nullptr);
      SlicedField pi = read_field_csv(stem + "pi.csv", nullptr);
      if (!(u.grid() == config.grid) || !(u_x.grid() == config.grid) ||
          !(pi.grid() == config.grid))
        throw ConfigError("verify: stored fields for agent " + std::to_string(i) +
                          " do not match the configured grid");
      sols.push_back(AgentSolution{std::move(u), std::move(u_x), std::move(pi)});
    }

    const PathBatch paths = simulate_paths(config.market.mu, config.market.T, config.mc);
    std::vector<Check> checks;

    // jump frequency against the exponential law
    {
      const JumpStats stats = jump_statistics(paths);
      const double expected = 1.0 - std::exp(-config.market.mu * config.market.T);
      Check c;
      c.name = "jump_fraction";
      c.value = std::fabs(stats.fraction - expected);
      c.bound = 4.0 * stats.stderr_fraction;
      c.passed = config.market.mu == 0.0 ? stats.jumps == 0 : c.value <= c.bound;
      checks.push_back(c);
      if (summary) (*summary)["jump_fraction"] = stats.fraction;
    }

    // per-agent checks: value identity, perturbation optimality, bookkeeping
    const std::vector<std::pair<std::string, std::function<double(double)>>> shapes = {
        {"constant", [](double) { return 1.0; }},
        {"tanh", [](double x) { return std::tanh(x); }},
        {"sin_bump", [](double x) { return std::sin(x) * std::exp(-x * x); }}};
    std::vector<SlicedField> perturbations;
    for (const auto& [name, f] : shapes)
      perturbations.push_back(
          field_from_function([&f](double, double x, int) { return f(x); }, config.grid));

    json agent_reports = json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
      const AgentSpec& agent = config.market.agents[i];
      const std::string tag = "agent_" + std::to_string(i);
      json ar;
      ar["agent"] = agent.name;

      const UtilityEstimate est = wealth_and_utility(lambda, sols[i].pi, agent, paths);
      const double v_ref = evaluate_value(sols[i], 0.0, 0.0, config.mc.x0, 0, agent.gamma);
      Check hjb;
      hjb.name = tag + "_hjb_value";
      hjb.value = std::fabs(est.mean - v_ref);
      hjb.bound = 4.0 * est.stderr_mean + 1e-12;
      hjb.passed = hjb.value <= hjb.bound;
      checks.push_back(hjb);
      ar["mc_utility"] = est.mean;
      ar["mc_stderr"] = est.stderr_mean;
      ar["pde_value"] = v_ref;

      json pert = json::array();
      for (double eps : {0.25, 0.5}) {
        const OptimalityReport rep =
            verify_optimality(sols[i], lambda, agent, paths, perturbations, eps);
        for (std::size_t p = 0; p < rep.checks.size(); ++p) {
          const PerturbationCheck& pc = rep.checks[p];
          Check c;
          c.name = tag + "_optimality_" + shapes[p].first + "_eps" + fmt(eps);
          c.value = pc.diff_mean;
          c.bound = -3.0 * pc.diff_stderr;
          c.passed = pc.passed;
          checks.push_back(c);
          json pj;
          pj["shape"] = shapes[p].first;
          pj["eps"] = eps;
          pj["diff_mean"] = pc.diff_mean;
          pj["diff_stderr"] = pc.diff_stderr;
          pj["quad_coeff"] = pc.quad_coeff;
          pj["passed"] = pc.passed;
          pert.push_back(pj);
        }
      }
      ar["perturbations"] = pert;

      const RisklessReport riskless = riskless_position(sols[i].pi, lambda, paths);
      Check rk;
      rk.name = tag + "_riskless_identity";
      rk.value = riskless.max_identity_error;
      rk.bound = 1e-12;
      rk.passed = rk.value <= rk.bound;
      checks.push_back(rk);
      ar["riskless_identity_error"] = riskless.max_identity_error;
      ar["riskless_max_abs"] = riskless.max_abs_rho;
      agent_reports.push_back(ar);
    }

    // clearing along simulated paths against the stored grid residual
    {
      EquilibriumResult eq{lambda, std::move(sols), 0, {}, {}, {}, {}, clearing_stored, true,
                           false};
      const ClearingPathReport rep = verify_clearing_on_paths(eq, paths);
      Check c;
      c.name = "clearing_on_paths";
      c.value = rep.max_abs;
      c.bound = clearing_stored + 1e-9;
      c.passed = c.value <= c.bound;
      checks.push_back(c);
      if (summary) (*summary)["clearing_max_abs"] = rep.max_abs;

      // per-path terminal table for the first agent at its optimum
      const std::vector<PathTerminal> terms = terminal_summaries(
          lambda, eq.agent_solutions.front().pi, config.market.agents.front(), paths);
      std::ofstream out(config.out_dir + "/paths.csv");
      if (!out) throw ConfigError("cannot open '" + config.out_dir + "/paths.csv'");
      out << "# version=" << kVersion << "\n# config_hash=" << config_hash_hex(config)
          << "\n# content=paths\n# agent=" << config.market.agents.front().name << "\n";
      out << "path,B_T,N_T,X_T,payoff_utility\n";
      for (std::size_t p = 0; p < terms.size(); ++p)
        out << p << ',' << fmt(terms[p].b_t) << ',' << terms[p].n_t << ',' << fmt(terms[p].x_t)
            << ',' << fmt(terms[p].utility) << "\n";
      if (!out) throw ConfigError("write failed for '" + config.out_dir + "/paths.csv'");
    }

    json reportj;
    reportj["version"] = kVersion;
    reportj["config_hash"] = config_hash_hex(config);
    reportj["seed"] = config.mc.seed;
    reportj["n_paths"] = config.mc.n_paths;
    reportj["n_steps"] = config.mc.n_steps;
    reportj["agents"] = agent_reports;
    json checksj = json::array();
    std::string failed_names;
    int failed = 0;
    for (const Check& c : checks) {
      json cj;
      cj["name"] = c.name;
      cj["value"] = c.value;
      cj["bound"] = c.bound;
      cj["passed"] = c.passed;
      checksj.push_back(cj);
      if (!c.passed) {
        ++failed;
        failed_names += (failed_names.empty() ? "" : ", ") + c.name;
      }
    }
    reportj["checks"] = checksj;
    reportj["all_passed"] = failed == 0;
    write_json_file(config.out_dir + "/verify_report.json", reportj);

    if (summary) {
      (*summary)["checks_total"] = static_cast<double>(checks.size());
      (*summary)["checks_failed"] = static_cast<double>(failed);
    }
    if (failed > 0) {
      if (error) *error = "verification failed: " + failed_names;
      return kExitStatistical;
    }
    return kExitOk;
  });
}

}  // namespace jumpeq
