#pragma once

// Run configuration: a small key-tree text format, strict about unknown and
// duplicate keys, with every numeric default made explicit after loading.
//
//   # comment
//   market.T = 0.25
//   market.mu = 0.5
//   agent.0.gamma = 1.0
//   agent.0.endowment = tanh(1,1,0)     # same terminal data on both slices
//   grid.nt = 200
//   grid.nx = 200
//   solver.tol = 1e-9
//
// Slice-specific terminal data uses agent.<i>.endowment.n0 / .n1.  When
// grid.x_min and grid.x_max are omitted, the domain is the symmetric interval
// of half-width max(6*sqrt(T), endowment scale + 4*sqrt(T)).

#include <cstdint>
#include <map>
#include <string>

#include "jumpeq/equilibrium.hpp"
#include "jumpeq/grid_field.hpp"
#include "jumpeq/montecarlo.hpp"

namespace jumpeq {

struct RunConfig {
  MarketSpec market;
  GridSpec grid;
  SolverOptions solver;
  SimConfig mc;
  std::string out_dir = "out";

  void validate() const;
};

// syntax stage: comments stripped, keys checked for duplicates, no semantics
std::map<std::string, std::string> parse_key_values(const std::string& text);
// semantic stage: schema, defaults, cross-field checks
RunConfig config_from_key_values(const std::map<std::string, std::string>& kv);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical serialization of the model identity (market.* and grid.* keys,
// numeric values at full precision).  Run parameters such as tolerances,
// path counts, and output paths deliberately stay out of it.
std::string canonical_model_text(const RunConfig& config);

// FNV-1a 64 over canonical_model_text
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace jumpeq
