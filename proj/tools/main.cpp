// Command-line front end.  Talks to the solver only through the C interface
// so it exercises the same surface other language bindings would use.
//
//   jumpeq solve       --config market.conf [--out DIR] ...
//   jumpeq equilibrate --config market.conf [--tol 1e-9] [--damping 0.5] ...
//   jumpeq verify      --config market.conf --out DIR    (DIR holds an
//                      equilibrate result; the verify report lands there too)
//
// Every flag can also come from the environment (JUMPEQ_TOL, JUMPEQ_SEED,
// ...); explicit flags win over environment values, which win over the file.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "jumpeq.h"

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string config_path;
  std::string out;
  std::string scheme;
  std::string mode;
  double tol = 0.0;
  double damping = 0.0;
  long long max_iter = 0;
  unsigned long long seed = 0;
};

void wire_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "config file (key-tree format)")
      ->envname("JUMPEQ_CONFIG")
      ->required();
  cmd->add_option("--out", opt.out, "output directory (overrides output.dir)")
      ->envname("JUMPEQ_OUT");
  cmd->add_option("--tol", opt.tol, "fixed-point tolerance (overrides solver.tol)")
      ->envname("JUMPEQ_TOL");
  cmd->add_option("--max-iter", opt.max_iter, "iteration cap (overrides solver.max_iter)")
      ->envname("JUMPEQ_MAX_ITER");
  cmd->add_option("--damping", opt.damping, "iteration damping in (0,1] (overrides solver.damping)")
      ->envname("JUMPEQ_DAMPING");
  cmd->add_option("--seed", opt.seed, "Monte Carlo seed (overrides mc.seed)")
      ->envname("JUMPEQ_SEED");
  cmd->add_option("--scheme", opt.scheme, "time scheme: implicit or cn")
      ->envname("JUMPEQ_SCHEME");
  cmd->add_option("--mode", opt.mode, "semilinear mode: newton or picard")
      ->envname("JUMPEQ_MODE");
}

int fail_config(void) {
  std::fprintf(stderr, "error: %s\n", jq_last_error());
  return JQ_ERR_CONFIG;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incomplete-market equilibrium solver (one asset, one jump signal)"};
  app.set_version_flag("--version", jq_version());
  app.require_subcommand(1);
  Options opt;
  CLI::App* solve = app.add_subcommand("solve", "solve all agents at lambda = 0");
  CLI::App* equilibrate = app.add_subcommand("equilibrate", "run the equilibrium fixed point");
  CLI::App* verify = app.add_subcommand("verify", "Monte Carlo checks of an equilibrate result");
  wire_common(solve, opt);
  wire_common(equilibrate, opt);
  wire_common(verify, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    std::fprintf(stderr, "error: %s\n", e.what());
    return JQ_ERR_CONFIG;
  }
  CLI::App* sub = app.get_subcommands().front();

  jq_config* cfg = jq_config_load(opt.config_path.c_str());
  if (!cfg) return fail_config();

  const auto set = [&](const char* key, const std::string& value) {
    return jq_config_set(cfg, key, value.c_str()) == JQ_OK;
  };
  bool ok = true;
  if (sub->count("--out")) ok = ok && set("output.dir", opt.out);
  if (sub->count("--tol")) ok = ok && set("solver.tol", fmt17(opt.tol));
  if (sub->count("--max-iter")) ok = ok && set("solver.max_iter", std::to_string(opt.max_iter));
  if (sub->count("--damping")) ok = ok && set("solver.damping", fmt17(opt.damping));
  if (sub->count("--seed")) ok = ok && set("mc.seed", std::to_string(opt.seed));
  if (sub->count("--scheme")) ok = ok && set("solver.scheme", opt.scheme);
  if (sub->count("--mode")) ok = ok && set("solver.mode", opt.mode);
  if (!ok) {
    const int code = fail_config();
    jq_config_free(cfg);
    return code;
  }

  jq_result* result = nullptr;
  int code = JQ_ERR_CONFIG;
  if (sub == solve) {
    code = jq_run_solve(cfg, &result);
  } else if (sub == equilibrate) {
    code = jq_run_equilibrate(cfg, &result);
  } else {
    // the result directory to verify is the effective output directory
    std::string dir = "out";
    if (sub->count("--out")) {
      dir = opt.out;
    } else {
      char buf[4096];
      if (jq_config_get(cfg, "output.dir", buf, sizeof buf) == JQ_OK) dir = buf;
    }
    code = jq_run_verify(cfg, dir.c_str(), &result);
  }

  if (result) {
    for (size_t i = 0; i < jq_result_count(result); ++i) {
      const char* key = jq_result_key(result, i);
      double value = 0.0;
      if (key && jq_result_get(result, key, &value) == JQ_OK)
        std::printf("%s = %s\n", key, fmt17(value).c_str());
    }
    if (code != JQ_OK) std::fprintf(stderr, "error: %s\n", jq_result_error(result));
    jq_result_free(result);
  } else if (code != JQ_OK) {
    std::fprintf(stderr, "error: %s\n", jq_last_error());
  }
  jq_config_free(cfg);
  return code;
}
