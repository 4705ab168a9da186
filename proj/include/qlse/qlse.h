/* C interface of the qlse library.
 *
 * Every function returns a qlse_status; on failure a message describing the
 * most recent error of the calling thread is available from qlse_last_error().
 * Objects are opaque and must be released with their _free function. */
#ifndef QLSE_H
#define QLSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QLSE_BUILDING_LIBRARY)
#    define QLSE_API __declspec(dllexport)
#  else
#    define QLSE_API __declspec(dllimport)
#  endif
#else
#  define QLSE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlse_status {
  QLSE_OK = 0,
  QLSE_ERR_DOMAIN = 1,
  QLSE_ERR_NUMERIC = 2,
  QLSE_ERR_VALIDATION = 3,
  QLSE_ERR_ADMISSIBILITY = 4,
  QLSE_ERR_DEGENERATE = 5,
  QLSE_ERR_STAGNATION = 6,
  QLSE_ERR_BRACKET = 7,
  QLSE_ERR_TUNING = 8,
  QLSE_ERR_USAGE = 9,
  QLSE_ERR_CONFIG = 10,
  QLSE_ERR_IO = 11,
  QLSE_VERIFY_FAILED = 100, /* ran to completion but a check or invariant failed */
  QLSE_ERR_INTERNAL = 101
} qlse_status;

typedef struct qlse_config qlse_config;
typedef struct qlse_solution qlse_solution;

/* Receives the human readable report of a command, in pieces. */
typedef void (*qlse_log_fn)(const char* text, void* user);

typedef struct qlse_run_options {
  const char* out_dir; /* NULL: [output] directory of the config */
  int has_seed;
  uint64_t seed;
  int refine;
  int inject_fault;
  int timing;
} qlse_run_options;

QLSE_API const char* qlse_version(void);
QLSE_API const char* qlse_last_error(void);
QLSE_API const char* qlse_status_name(qlse_status status);
/* Process exit status used by the command line tool. */
QLSE_API int qlse_exit_code(qlse_status status);

QLSE_API qlse_status qlse_config_load(const char* path, qlse_config** out);
QLSE_API qlse_status qlse_config_parse(const char* text, qlse_config** out);
QLSE_API void qlse_config_free(qlse_config* config);

/* command: verify-g, verify-h, solve, oracle, paths or sweep. config may be
 * NULL for verify-g. options may be NULL. */
QLSE_API qlse_status qlse_run(const char* command, const qlse_config* config,
                              const qlse_run_options* options, qlse_log_fn log, void* user);

/* The dual transform and its inverse. */
QLSE_API qlse_status qlse_g(double t, double* out);
QLSE_API qlse_status qlse_g_inverse(double u, double* out);

/* Solves the configured problem from the default seed. */
QLSE_API qlse_status qlse_solve(const qlse_config* config, int refine, qlse_solution** out);
/* key: beta, psi, theta, deficit, el_residual, quasilinear_residual,
 * grad_norm, iterations, converged, antisymmetry_defect. */
QLSE_API qlse_status qlse_solution_get(const qlse_solution* solution, const char* key, double* out);
QLSE_API size_t qlse_solution_size(const qlse_solution* solution);
/* Copies the dual field v (n must equal qlse_solution_size). */
QLSE_API qlse_status qlse_solution_field(const qlse_solution* solution, double* buffer, size_t n);
QLSE_API void qlse_solution_free(qlse_solution* solution);

#ifdef __cplusplus
}
#endif

#endif
