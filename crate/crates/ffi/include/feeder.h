#ifndef FEEDER_H
#define FEEDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FeederAlgo {
  FEEDER_ALGO_EXACT = 0,
  FEEDER_ALGO_GREEDY = 1,
  FEEDER_ALGO_LOCAL_SEARCH = 2,
} FeederAlgo;

typedef enum FeederProblem {
  FEEDER_PROBLEM_MIN_DIST = 0,
  FEEDER_PROBLEM_MIN_NUM = 1,
} FeederProblem;

/**
 * Result codes; the non-zero values match the command-line exit codes.
 */
typedef enum FeederStatus {
  FEEDER_STATUS_OK = 0,
  FEEDER_STATUS_INTERNAL = 1,
  FEEDER_STATUS_INFEASIBLE = 2,
  FEEDER_STATUS_CONFIG = 3,
  FEEDER_STATUS_IO = 4,
  FEEDER_STATUS_NULL_ARGUMENT = 5,
} FeederStatus;

/**
 * One interval of drivers and riders.
 */
typedef struct FeederInstance FeederInstance;

/**
 * Metrics of a solved interval.
 */
typedef struct FeederReport FeederReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *feeder_last_error(void);

/**
 * Parses an instance from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FeederStatus feeder_instance_from_json(const char *json, struct FeederInstance **out);

/**
 * Generates an instance with the default generator settings, `riders`
 * riders and the interval starting at `start` seconds.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FeederStatus feeder_instance_generate(uint64_t seed,
                                           uint32_t riders,
                                           int64_t start,
                                           struct FeederInstance **out);

/**
 * Number of riders of an instance; 0 for null.
 *
 * # Safety
 * `inst` must be null or a live instance handle.
 */
uint32_t feeder_instance_riders(const struct FeederInstance *inst);

/**
 * Instance as JSON; release with [`feeder_string_free`].
 *
 * # Safety
 * `inst` must be a live instance handle and `out` a valid pointer.
 */
enum FeederStatus feeder_instance_to_json(const struct FeederInstance *inst, char **out);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void feeder_instance_free(struct FeederInstance *inst);

/**
 * Solves one interval. `time_limit_s <= 0` means no limit; `clustered`
 * solves each cluster of the default clustering separately.
 *
 * # Safety
 * `inst` must be a live instance handle and `out` a valid pointer.
 */
enum FeederStatus feeder_solve(const struct FeederInstance *inst,
                               enum FeederProblem problem,
                               enum FeederAlgo algo,
                               bool clustered,
                               double time_limit_s,
                               struct FeederReport **out);

/**
 * Objective value of a solved interval; 0 for null.
 *
 * # Safety
 * `rep` must be null or a live report handle.
 */
uint64_t feeder_report_objective(const struct FeederReport *rep);

/**
 * Number of drivers assigned; 0 for null.
 *
 * # Safety
 * `rep` must be null or a live report handle.
 */
uint64_t feeder_report_assigned(const struct FeederReport *rep);

/**
 * Report as CSV, timings zeroed when `zero_timings` is set; release with
 * [`feeder_string_free`].
 *
 * # Safety
 * `rep` must be a live report handle and `out` a valid pointer.
 */
enum FeederStatus feeder_report_csv(const struct FeederReport *rep, bool zero_timings, char **out);

/**
 * # Safety
 * `rep` must be null or a handle not yet freed.
 */
void feeder_report_free(struct FeederReport *rep);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void feeder_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEEDER_H */
