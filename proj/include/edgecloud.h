/* C interface to the edge-cloud resource allocation toolkit.
 *
 * All functionality is reached through ec_run: it loads a scenario file,
 * executes one of the experiment families and returns an opaque result
 * handle holding the CSV table (and a one-line summary where the subcommand
 * produces one). Status codes mirror the CLI exit codes.
 */

#ifndef EDGECLOUD_H
#define EDGECLOUD_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ec_status {
  EC_OK = 0,
  EC_ERROR_SCHEMA = 2,     /* malformed scenario or bad arguments */
  EC_ERROR_INFEASIBLE = 3, /* scenario valid but has no feasible solution */
  EC_ERROR_NUMERIC = 4     /* solver failed to produce a trustworthy result */
} ec_status;

typedef struct ec_result ec_result;

/* subcommand: one of "offload", "cache", "rem", "reliability", "centrality".
 * scenario_path: JSON scenario file.
 * seed: deterministic; equal seeds give byte-identical CSV.
 * sweep: optional "name=v1,v2,..." override, or NULL.
 * threads: parallelism cap; 0 picks the hardware concurrency.
 * out: receives a handle on success; free with ec_result_free. */
ec_status ec_run(const char* subcommand, const char* scenario_path, unsigned long long seed,
                 const char* sweep, int threads, ec_result** out);

/* Same as ec_run but with the scenario text passed directly. */
ec_status ec_run_text(const char* subcommand, const char* scenario_json, unsigned long long seed,
                      const char* sweep, int threads, ec_result** out);

/* Owned by the handle; valid until ec_result_free. */
const char* ec_result_csv(const ec_result* result);
const char* ec_result_summary(const ec_result* result);

void ec_result_free(ec_result* result);

/* Message describing the most recent failure on this thread. */
const char* ec_last_error(void);

const char* ec_version(void);

#ifdef __cplusplus
}
#endif

#endif
