/*
 * riskalloc C API.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function. Functions return an ra_status; on failure a
 * human-readable message is available from ra_last_error() on the calling
 * thread until the next failing call. Strings returned through char** are
 * heap-allocated and must be released with ra_string_free().
 *
 * Matrices cross the boundary as row-major arrays. Allocations are
 * tasks x species.
 */
#ifndef RISKALLOC_H
#define RISKALLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RISKALLOC_BUILDING)
#    define RA_API __declspec(dllexport)
#  else
#    define RA_API __declspec(dllimport)
#  endif
#else
#  define RA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ra_status {
  RA_OK = 0,
  RA_ERR_INVALID_ARGUMENT = 1,
  RA_ERR_DIMENSION = 2,
  RA_ERR_INFEASIBLE = 3,
  RA_ERR_PARSE = 4,
  RA_ERR_IO = 5,
  RA_ERR_INTERNAL = 6
} ra_status;

typedef enum ra_method {
  RA_METHOD_ADAPTIVE = 0,
  RA_METHOD_NEUTRAL = 1,
  RA_METHOD_AVERSE = 2,
  RA_METHOD_RANDOM = 3
} ra_method;

typedef struct ra_problem ra_problem;
typedef struct ra_solution ra_solution;
typedef struct ra_benchmark ra_benchmark;

/* Mirrors the solver defaults; fill with ra_solver_config_default(). */
typedef struct ra_solver_config {
  int32_t num_starts;
  int32_t max_iters_per_start;
  double step_init;
  double armijo_c;
  double step_shrink;
  double convergence_tol;
  const double* beta_schedule; /* NULL selects the default schedule */
  size_t beta_schedule_len;
  double lambda;
  int32_t hill_climb_max_moves;
  uint64_t seed;
} ra_solver_config;

typedef struct ra_generator_config {
  size_t num_species;
  size_t num_traits;
  size_t num_tasks;
  double dominant_mu_range[2];
  double nondominant_mu_range[2];
  double dominant_var_range[2];
  double nondominant_var_range[2];
  int64_t count_range[2];
  double requirement_fraction_range[2];
  uint64_t seed;
} ra_generator_config;

RA_API const char* ra_version(void);
RA_API const char* ra_last_error(void);
RA_API const char* ra_status_name(ra_status status);
RA_API void ra_string_free(char* s);

RA_API const char* ra_method_name(ra_method method);
RA_API ra_status ra_method_parse(const char* name, ra_method* out);

/* ---- problems ---------------------------------------------------------- */

RA_API ra_status ra_problem_from_json(const char* text, ra_problem** out);
RA_API ra_status ra_problem_load(const char* path, ra_problem** out);
RA_API ra_status ra_problem_to_json(const ra_problem* problem, char** out);
RA_API ra_status ra_problem_dims(const ra_problem* problem, size_t* species,
                                 size_t* traits, size_t* tasks);
RA_API ra_status ra_problem_counts(const ra_problem* problem, int64_t* counts,
                                   size_t len);
RA_API ra_status ra_problem_generate(const ra_generator_config* cfg,
                                     uint64_t instance_id, ra_problem** out);
RA_API void ra_problem_free(ra_problem* problem);

/* Writes the preset problem and a JSON document of its named reference
 * allocations. Unknown names fail with RA_ERR_INVALID_ARGUMENT. */
RA_API ra_status ra_preset(const char* name, ra_problem** problem,
                           char** references_json);

/* ---- evaluation -------------------------------------------------------- */

/* feasible receives 1/0; slack (may be NULL) receives counts - column sums;
 * violating_species receives the first bad column or -1. */
RA_API ra_status ra_validate_allocation(const ra_problem* problem,
                                        const int64_t* x, size_t len,
                                        int* feasible, int64_t* slack,
                                        int64_t* violating_species);

/* Closed-form ln P(task succeeds) for a (possibly fractional) allocation. */
RA_API ra_status ra_success_log_probs(const ra_problem* problem,
                                      const double* x, size_t len,
                                      double* out, size_t out_len);

/* Monte Carlo success rates over `trials` sampled teams. By default robots of
 * one species serving one task share a trait draw, matching the closed form;
 * per_robot != 0 draws every robot independently instead. */
RA_API ra_status ra_evaluate_mc(const ra_problem* problem, const int64_t* x,
                                size_t len, uint64_t trials, uint64_t seed,
                                int clamp_nonnegative, int per_robot,
                                double* task_rates,
                                size_t rates_len, double* combined_rate);

/* ---- solving ----------------------------------------------------------- */

RA_API void ra_solver_config_default(ra_solver_config* cfg);
RA_API ra_status ra_solve(const ra_problem* problem, ra_method method,
                          const ra_solver_config* cfg, ra_solution** out);
RA_API ra_status ra_solution_allocation(const ra_solution* solution,
                                        int64_t* x, size_t len);
RA_API ra_status ra_solution_task_log_probs(const ra_solution* solution,
                                            double* out, size_t len);
RA_API double ra_solution_min_log_prob(const ra_solution* solution);
RA_API double ra_solution_seconds(const ra_solution* solution);
/* Result document; seconds is null unless include_timing != 0. */
RA_API ra_status ra_solution_to_json(const ra_solution* solution,
                                     int include_timing, char** out);
RA_API void ra_solution_free(ra_solution* solution);

/* ---- benchmark --------------------------------------------------------- */

RA_API void ra_generator_config_default(ra_generator_config* cfg);
RA_API ra_status ra_benchmark_run(const ra_generator_config* gen,
                                  const ra_method* methods, size_t n_methods,
                                  const ra_solver_config* cfg,
                                  size_t n_instances, unsigned threads,
                                  ra_benchmark** out);
RA_API size_t ra_benchmark_size(const ra_benchmark* bench);
RA_API ra_status ra_benchmark_to_csv(const ra_benchmark* bench,
                                     int include_timing, char** out);
RA_API ra_status ra_benchmark_summary(const ra_benchmark* bench, char** out);
RA_API void ra_benchmark_free(ra_benchmark* bench);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RISKALLOC_H */
