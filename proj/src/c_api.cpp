#include "jumpeq.h"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jumpeq/config.hpp"
#include "jumpeq/errors.hpp"
#include "jumpeq/runner.hpp"

struct jq_config {
  std::map<std::string, std::string> kv;
};

struct jq_result {
  int status = JQ_OK;
  std::string error;
  jumpeq::SummaryMap values;
  std::vector<std::string> keys;  // sorted, cached for indexed access
};

namespace {

thread_local std::string tl_error;

void set_error(const std::string& msg) { tl_error = msg; }

int classify(const std::exception& e) {
  if (dynamic_cast<const jumpeq::ConfigError*>(&e)) return JQ_ERR_CONFIG;
  return JQ_ERR_SOLVER;
}

jq_config* make_config(const std::string& text) {
  try {
    auto kv = jumpeq::parse_key_values(text);
    jumpeq::config_from_key_values(kv);  // validate before handing it out
    tl_error.clear();
    return new jq_config{std::move(kv)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

using Runner = int (*)(const jumpeq::RunConfig&, jumpeq::SummaryMap*, std::string*);

int run_common(const jq_config* config, jq_result** result, const Runner runner,
               const std::string* verify_dir) {
  if (result) *result = nullptr;
  if (!config) {
    set_error("config is NULL");
    return JQ_ERR_CONFIG;
  }
  jq_result local;
  try {
    const jumpeq::RunConfig cfg = jumpeq::config_from_key_values(config->kv);
    std::string err;
    local.status = verify_dir
                       ? jumpeq::run_verify(cfg, *verify_dir, &local.values, &err)
                       : runner(cfg, &local.values, &err);
    local.error = err;
  } catch (const std::exception& e) {
    local.status = classify(e);
    local.error = e.what();
  }
  const int status = local.status;
  if (status == JQ_OK)
    tl_error.clear();
  else
    set_error(local.error);
  if (result) {
    local.keys.reserve(local.values.size());
    for (const auto& [k, v] : local.values) local.keys.push_back(k);
    *result = new jq_result(std::move(local));
  }
  return status;
}

}  // namespace

extern "C" {

const char* jq_version(void) { return jumpeq::kVersion; }

const char* jq_last_error(void) { return tl_error.c_str(); }

jq_config* jq_config_load(const char* path) {
  if (!path) {
    set_error("path is NULL");
    return nullptr;
  }
  std::ifstream in(path);
  if (!in) {
    set_error(std::string("config: cannot open '") + path + "'");
    return nullptr;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return make_config(buf.str());
}

jq_config* jq_config_parse(const char* text) {
  if (!text) {
    set_error("text is NULL");
    return nullptr;
  }
  return make_config(text);
}

void jq_config_free(jq_config* config) { delete config; }

int jq_config_set(jq_config* config, const char* key, const char* value) {
  if (!config || !key || !value) {
    set_error("config, key, and value must be non-NULL");
    return JQ_ERR_CONFIG;
  }
  auto kv = config->kv;
  kv[key] = value;
  try {
    jumpeq::config_from_key_values(kv);
  } catch (const std::exception& e) {
    set_error(e.what());
    return JQ_ERR_CONFIG;
  }
  config->kv = std::move(kv);
  tl_error.clear();
  return JQ_OK;
}

int jq_config_get(const jq_config* config, const char* key, char* buf, size_t len) {
  if (!config || !key || !buf || len == 0) {
    set_error("config, key, and a non-empty buffer are required");
    return JQ_ERR_CONFIG;
  }
  const auto it = config->kv.find(key);
  if (it == config->kv.end()) {
    set_error(std::string("config: key '") + key + "' is not set");
    return JQ_ERR_CONFIG;
  }
  if (it->second.size() + 1 > len) {
    set_error("buffer too small");
    return JQ_ERR_CONFIG;
  }
  std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
  tl_error.clear();
  return JQ_OK;
}

int jq_config_hash(const jq_config* config, char* buf, size_t len) {
  if (!config || !buf || len < 17) {
    set_error("config and a buffer of at least 17 bytes are required");
    return JQ_ERR_CONFIG;
  }
  try {
    const std::string hex = jumpeq::config_hash_hex(jumpeq::config_from_key_values(config->kv));
    std::memcpy(buf, hex.c_str(), hex.size() + 1);
  } catch (const std::exception& e) {
    set_error(e.what());
    return JQ_ERR_CONFIG;
  }
  tl_error.clear();
  return JQ_OK;
}

int jq_run_solve(const jq_config* config, jq_result** result) {
  return run_common(config, result, &jumpeq::run_solve, nullptr);
}

int jq_run_equilibrate(const jq_config* config, jq_result** result) {
  return run_common(config, result, &jumpeq::run_equilibrate, nullptr);
}

int jq_run_verify(const jq_config* config, const char* result_dir, jq_result** result) {
  if (!result_dir) {
    if (result) *result = nullptr;
    set_error("result_dir is NULL");
    return JQ_ERR_CONFIG;
  }
  const std::string dir = result_dir;
  return run_common(config, result, nullptr, &dir);
}

int jq_result_status(const jq_result* result) { return result ? result->status : JQ_ERR_CONFIG; }

const char* jq_result_error(const jq_result* result) {
  return result ? result->error.c_str() : "result is NULL";
}

size_t jq_result_count(const jq_result* result) { return result ? result->values.size() : 0; }

const char* jq_result_key(const jq_result* result, size_t index) {
  if (!result || index >= result->keys.size()) return nullptr;
  return result->keys[index].c_str();
}

int jq_result_get(const jq_result* result, const char* key, double* value) {
  if (!result || !key || !value) {
    set_error("result, key, and value must be non-NULL");
    return JQ_ERR_CONFIG;
  }
  const auto it = result->values.find(key);
  if (it == result->values.end()) {
    set_error(std::string("result has no entry '") + key + "'");
    return JQ_ERR_CONFIG;
  }
  *value = it->second;
  tl_error.clear();
  return JQ_OK;
}

void jq_result_free(jq_result* result) { delete result; }

}  // extern "C"
