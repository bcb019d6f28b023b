/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the kinetic limit laboratory. All functions return a
 * kl_status; on failure a thread-local message is available through
 * kl_last_error(). Handles are opaque and owned by the caller via the
 * matching _free function.
 */

#ifndef KINLAB_H
#define KINLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kl_status {
  KL_OK = 0,            /* success */
  KL_CONFIG_ERROR = 1,  /* invalid configuration, arguments or input shape */
  KL_RUNTIME_ERROR = 2  /* I/O or numerical failure at run time */
} kl_status;

/* Version string of the library. */
const char* kl_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
const char* kl_last_error(void);

/* Documented configuration key list, one "key default meaning" per line. */
const char* kl_config_keys(void);

/* ------------------------------------------------------------------ */
/* configuration handles                                               */

typedef struct kl_config kl_config;

/* New configuration with built-in defaults. */
kl_status kl_config_new(kl_config** out);

/* Parse a flat key-value config file ('#' comments, no nesting). */
kl_status kl_config_load(const char* path, kl_config** out);

/* Set or override a single key. Validation happens when a run starts. */
kl_status kl_config_set(kl_config* cfg, const char* key, const char* value);

void kl_config_free(kl_config* cfg);

/* ------------------------------------------------------------------ */
/* pipeline stages; artifacts are read from and written to the         */
/* configured output directory, so stages can run independently        */

/* Sample and run the seeded ensemble; persists event logs, per-member
 * cluster statistics and the run manifest. */
kl_status kl_run_simulate(const kl_config* cfg);

/* Read persisted event logs and emit collision-graph statistics. */
kl_status kl_run_graphs(const kl_config* cfg);

/* Read persisted event logs and emit histograms and cumulants at the
 * configured sample times. */
kl_status kl_run_estimate(const kl_config* cfg);

/* Solve the kinetic equation from the configured initial data and persist
 * the distribution fields and moment/entropy tables. */
kl_status kl_run_boltzmann(const kl_config* cfg);

/* Compare persisted estimate and solver artifacts at matched times; emits
 * a distance-vs-time CSV and SVG. Fails with KL_CONFIG_ERROR and a shape
 * diagnostic when the grids do not match. */
kl_status kl_run_compare(const kl_config* cfg);

/* Full pipeline over a strictly decreasing diameter list (>= 3 values);
 * emits distance, chaos-decay and cluster-trend tables with fits. */
kl_status kl_run_sweep(const kl_config* cfg, const double* eps_list,
                       int n_eps);

/* Exhaustively verify the connected-subgraph bound on all overlap matrices
 * with up to max_n vertices. Writes a one-line report into `report`
 * (truncated to report_len). */
kl_status kl_run_penrose(int max_n, char* report, size_t report_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KINLAB_H */
