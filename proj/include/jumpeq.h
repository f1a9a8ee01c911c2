#ifndef JUMPEQ_H
#define JUMPEQ_H

/* C interface to the equilibrium solver.  All entry points are thread-safe;
 * error text is kept per thread and survives until the next failing call on
 * the same thread.  Status codes double as process exit codes. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define JQ_OK 0
#define JQ_ERR_CONFIG 2
#define JQ_ERR_SOLVER 3
#define JQ_ERR_NOT_CONVERGED 4
#define JQ_ERR_STATISTICAL 5

typedef struct jq_config jq_config;
typedef struct jq_result jq_result;

/* semantic version of the library */
const char* jq_version(void);

/* text of the most recent error on this thread, empty string when none */
const char* jq_last_error(void);

/* Load and validate a key-tree config file; NULL on error.
 * Free with jq_config_free. */
jq_config* jq_config_load(const char* path);

/* Same, from config text held in memory. */
jq_config* jq_config_parse(const char* text);

void jq_config_free(jq_config* config);

/* Override one key, revalidating the whole config; JQ_OK or JQ_ERR_CONFIG.
 * A failed set leaves the config unchanged. */
int jq_config_set(jq_config* config, const char* key, const char* value);

/* Copy the value of a key as written (overrides included) into buf.
 * JQ_ERR_CONFIG when the key is absent or buf is too small. */
int jq_config_get(const jq_config* config, const char* key, char* buf, size_t len);

/* 16 lowercase hex digits identifying the model (market and grid keys only);
 * buf needs at least 17 bytes. */
int jq_config_hash(const jq_config* config, char* buf, size_t len);

/* Each run returns its status code and, when result is non-NULL, a result
 * object (allocated on both success and failure) carrying the status, the
 * error text, and named numeric outputs.  Free with jq_result_free. */
int jq_run_solve(const jq_config* config, jq_result** result);
int jq_run_equilibrate(const jq_config* config, jq_result** result);
int jq_run_verify(const jq_config* config, const char* result_dir, jq_result** result);

int jq_result_status(const jq_result* result);
const char* jq_result_error(const jq_result* result);
size_t jq_result_count(const jq_result* result);
/* key at index in [0, jq_result_count), sorted; NULL when out of range */
const char* jq_result_key(const jq_result* result, size_t index);
/* JQ_OK and *value filled when the key exists, JQ_ERR_CONFIG otherwise */
int jq_result_get(const jq_result* result, const char* key, double* value);
void jq_result_free(jq_result* result);

#ifdef __cplusplus
}
#endif

#endif /* JUMPEQ_H */
