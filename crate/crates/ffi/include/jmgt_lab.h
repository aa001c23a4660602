#ifndef JMGT_LAB_H
#define JMGT_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>

typedef enum JmgtStatus {
  JMGT_STATUS_OK = 0,
  JMGT_STATUS_NULL_POINTER = 1,
  JMGT_STATUS_INVALID_UTF8 = 2,
  JMGT_STATUS_INVALID_ARGUMENT = 3,
  JMGT_STATUS_CONFIG = 4,
  JMGT_STATUS_IO = 5,
  JMGT_STATUS_NON_DEGENERACY = 6,
  JMGT_STATUS_DIVERGENCE = 7,
  JMGT_STATUS_STEP_FAILURE = 8,
  JMGT_STATUS_PANIC = 9,
} JmgtStatus;

typedef enum JmgtSolver {
  JMGT_SOLVER_LINEAR = 0,
  JMGT_SOLVER_FULL = 1,
  JMGT_SOLVER_RELAXED = 2,
  JMGT_SOLVER_WESTERVELT = 3,
} JmgtSolver;

/**
 * Which time derivative of the modal coefficients to read.
 */
typedef enum JmgtSeries {
  JMGT_SERIES_VALUE = 0,
  JMGT_SERIES_VELOCITY = 1,
  JMGT_SERIES_ACCELERATION = 2,
} JmgtSeries;

/**
 * Parsed experiment config.
 */
typedef struct JmgtConfig JmgtConfig;

/**
 * Solved trajectory together with the basis it lives in.
 */
typedef struct JmgtSolution JmgtSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *jmgt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jmgt_version(void);

/**
 * Parses config text. On success `*out` receives a handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum JmgtStatus jmgt_config_from_str(const char *text, struct JmgtConfig **out);

/**
 * Reads and parses a config file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum JmgtStatus jmgt_config_from_file(const char *path, struct JmgtConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from `jmgt_config_from_*` not yet freed.
 */
void jmgt_config_free(struct JmgtConfig *cfg);

/**
 * Runs one solver on the config's data. On success `*out` receives a
 * solution handle; on solver failure nothing is allocated.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a writable pointer.
 */
enum JmgtStatus jmgt_solve(const struct JmgtConfig *cfg,
                           enum JmgtSolver solver,
                           struct JmgtSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from `jmgt_solve` not yet freed.
 */
void jmgt_solution_free(struct JmgtSolution *sol);

/**
 * Number of stored time levels, including `t = 0`. Zero for a null handle.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
size_t jmgt_solution_steps(const struct JmgtSolution *sol);

/**
 * Number of modes. Zero for a null handle.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
size_t jmgt_solution_modes(const struct JmgtSolution *sol);

/**
 * Fixed-point iterations used; zero for the linear solver.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
size_t jmgt_solution_picard_iterations(const struct JmgtSolution *sol);

/**
 * Copies the time grid into `buf`, which must hold `jmgt_solution_steps`
 * values.
 *
 * # Safety
 * `sol` must be a live solution handle and `buf` must point to `len`
 * writable doubles.
 */
enum JmgtStatus jmgt_solution_times(const struct JmgtSolution *sol, double *buf, size_t len);

/**
 * Copies the modal coefficients of one series at time level `step` into
 * `buf`, which must hold `jmgt_solution_modes` values.
 *
 * # Safety
 * `sol` must be a live solution handle and `buf` must point to `len`
 * writable doubles.
 */
enum JmgtStatus jmgt_solution_coefficients(const struct JmgtSolution *sol,
                                           size_t step,
                                           enum JmgtSeries series,
                                           double *buf,
                                           size_t len);

/**
 * Evaluates `∂ₓ^deriv ψ(x)` at time level `step`.
 *
 * # Safety
 * `sol` must be a live solution handle and `out` a writable pointer.
 */
enum JmgtStatus jmgt_solution_eval(const struct JmgtSolution *sol,
                                   size_t step,
                                   double x,
                                   size_t deriv,
                                   double *out);

/**
 * Runs a named subcommand (`solve-linear`, `mms`, ...) and writes its CSV
 * artifacts into `out_dir`, as the command-line tool does.
 *
 * # Safety
 * `command` and `out_dir` must be valid NUL-terminated strings and `cfg` a
 * live config handle.
 */
enum JmgtStatus jmgt_run(const char *command, const struct JmgtConfig *cfg, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JMGT_LAB_H */
