#ifndef UPFAIR_H
#define UPFAIR_H

/* C interface to the rate-allocation engine: load or build a scenario,
 * run the bidding protocol (optionally over a rate sweep), inspect per-user
 * results, write CSVs, and verify against the centralized reference solver.
 *
 * Every fallible call returns upfair_status; on failure the thread-local
 * upfair_last_error() carries a one-line diagnostic. Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching _free. Strings handed out by row accessors stay valid until the
 * owning object is freed.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum upfair_status {
  UPFAIR_OK = 0,
  UPFAIR_ERR_INVALID_ARGUMENT = 1,
  UPFAIR_ERR_PARSE = 2,
  UPFAIR_ERR_VALIDATION = 3,
  UPFAIR_ERR_SOLVER = 4,
  UPFAIR_ERR_DEGENERATE = 5,
  UPFAIR_ERR_IO = 6,
  UPFAIR_ERR_INTERNAL = 7
} upfair_status;

/* Message for the most recent failure on this thread; empty string if none. */
const char* upfair_last_error(void);

typedef struct upfair_scenario upfair_scenario;
typedef struct upfair_result upfair_result;
typedef struct upfair_verify_result upfair_verify_result;

/* Engine and demand-solver knobs. Fill from upfair_config_default, then
 * override fields as needed; passing NULL wherever a config is expected
 * uses the defaults. */
typedef struct upfair_config {
  double delta;               /* convergence threshold, default 1e-3 */
  int max_rounds;             /* default 10000 */
  double damping;             /* (0,1], default 1 */
  double initial_bid;         /* default 1 */
  double foc_tolerance;       /* demand solver residual, default 1e-9 */
  double rate_cap_multiplier; /* demand cap as a multiple of b / r_max */
  int max_bracket_doublings;  /* demand solver bracket budget */
} upfair_config;

void upfair_config_default(upfair_config* cfg);

/* ----- scenarios ----- */

upfair_status upfair_scenario_load(const char* path, upfair_scenario** out);
upfair_status upfair_scenario_table1(upfair_scenario** out);

/* Merge all domains into a single one covering every sector. */
upfair_status upfair_scenario_pool_domains(upfair_scenario* scenario);

/* Fix every domain's total rate, dropping any sweep grid. */
upfair_status upfair_scenario_set_rate(upfair_scenario* scenario, double rate);

/* Common sweep grid of the scenario's domains. Fails if no domain carries a
 * sweep or if the domains disagree. */
upfair_status upfair_scenario_sweep_grid(const upfair_scenario* scenario,
                                         double* start, double* end,
                                         double* step);

/* Scenario name as declared in its source ("table1" for the builtin).
 * Valid as long as the scenario handle; NULL for a NULL scenario. */
const char* upfair_scenario_name(const upfair_scenario* scenario);

void upfair_scenario_free(upfair_scenario* scenario);

/* ----- runs ----- */

/* One protocol run per domain. Requires all domain rates fixed. */
upfair_status upfair_run(const upfair_scenario* scenario,
                         const upfair_config* cfg, upfair_result** out);

/* Re-run the scenario with every domain's rate set to each grid point
 * (start, start+step, ... up to end inclusive). */
upfair_status upfair_sweep(const upfair_scenario* scenario,
                           const upfair_config* cfg, double start, double end,
                           double step, upfair_result** out);

typedef struct upfair_row {
  const char* domain;
  const char* sector;
  const char* user;
  const char* kind; /* "sigmoid" or "log" */
  double total_rate; /* the domain's R for this run */
  double rate;
  double bid;
  double price;
  int rounds;
  int converged;
} upfair_row;

size_t upfair_result_row_count(const upfair_result* result);
upfair_status upfair_result_row(const upfair_result* result, size_t index,
                                upfair_row* out);

/* 1 iff every domain of every run converged. */
int upfair_result_converged(const upfair_result* result);

/* Per-user results table (one row per user per rate point). */
upfair_status upfair_result_write_csv(const upfair_result* result,
                                      const char* scenario_name,
                                      const char* path);

/* Round-by-round logs; defined for single-run results only. Either path may
 * be NULL to skip that table. */
upfair_status upfair_result_write_trace_csv(const upfair_result* result,
                                            const char* sector_path,
                                            const char* user_path);

void upfair_result_free(upfair_result* result);

/* ----- verification ----- */

typedef struct upfair_verify_row {
  const char* user;
  const char* domain;
  double distributed;  /* protocol rate */
  double centralized;  /* reference rate */
  double gap;          /* |distributed - centralized| */
} upfair_verify_row;

/* Run the protocol, solve each domain centrally over its pooled users, and
 * compare per user. `trials` random-transfer checks certify the distributed
 * allocation (0 skips certification). Pass tolerance <= 0 to demand exact
 * agreement. */
upfair_status upfair_verify(const upfair_scenario* scenario,
                            const upfair_config* cfg, int trials,
                            double tolerance, upfair_verify_result** out);

size_t upfair_verify_row_count(const upfair_verify_result* result);
upfair_status upfair_verify_get_row(const upfair_verify_result* result,
                                    size_t index, upfair_verify_row* out);
int upfair_verify_passed(const upfair_verify_result* result);
int upfair_verify_certified(const upfair_verify_result* result);
int upfair_verify_converged(const upfair_verify_result* result);
void upfair_verify_free(upfair_verify_result* result);

#ifdef __cplusplus
}
#endif

#endif
