#ifndef KNAPSACK_MOEA_H
#define KNAPSACK_MOEA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KmStatus {
  KM_STATUS_OK = 0,
  KM_STATUS_NULL_POINTER = 1,
  KM_STATUS_INVALID_ARGUMENT = 2,
  KM_STATUS_PARSE = 3,
  KM_STATUS_IO = 4,
  KM_STATUS_ORACLE_CAPACITY = 5,
  KM_STATUS_PRECONDITION = 6,
  KM_STATUS_PANIC = 7,
} KmStatus;

typedef enum KmInit {
  KM_INIT_GREEDY = 0,
  KM_INIT_LOCAL = 1,
  KM_INIT_ADVERSARIAL = 2,
} KmInit;

// Opaque knapsack instance.
typedef struct KmInstance KmInstance;

// Opaque run trajectory.
typedef struct KmTrajectory KmTrajectory;

typedef struct KmMoeaOptions {
  size_t population_size;
  // 0 leaves the generation budget unset.
  uint64_t max_generations;
  // 0 leaves the evaluation budget unset.
  uint64_t max_evaluations;
  bool has_mutation_rate;
  double mutation_rate;
  uint64_t seed;
  uint64_t stream;
} KmMoeaOptions;

// One trajectory row; missing values are NaN.
typedef struct KmTrajectoryRow {
  uint64_t generation;
  uint64_t evaluations;
  double best_feasible;
  double best_ratio;
  // x_max, x_loc, x_vioa, x_viob, x_vioc, other feasible, other infeasible.
  size_t composition[7];
} KmTrajectoryRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
const char *km_last_error_message(void);

enum KmStatus km_instance1_new(double alpha, size_t n, struct KmInstance **out_instance);

enum KmStatus km_instance2_new(size_t n, struct KmInstance **out_instance);

// Instance from `n` values and weights.
enum KmStatus km_instance_new(const double *values,
                              const double *weights,
                              size_t n,
                              double capacity,
                              struct KmInstance **out_instance);

enum KmStatus km_instance_read_json(const char *path, struct KmInstance **out_instance);

enum KmStatus km_instance_write_json(const struct KmInstance *instance, const char *path);

enum KmStatus km_instance_size(const struct KmInstance *instance, size_t *out_n);

enum KmStatus km_instance_capacity(const struct KmInstance *instance, double *out_capacity);

void km_instance_free(struct KmInstance *instance);

// Objective and violation of the 0/1 vector `bits` (length `n`, nonzero = selected).
enum KmStatus km_evaluate(const struct KmInstance *instance,
                          const uint8_t *bits,
                          size_t n,
                          double *out_objective,
                          double *out_violation);

// Whether (objective_a, violation_a) Pareto-dominates (objective_b, violation_b).
bool km_dominates(double objective_a, double violation_a, double objective_b, double violation_b);

// Better objective of the by-value and by-ratio greedy solutions.
enum KmStatus km_greedy(const struct KmInstance *instance, double *out_objective);

enum KmStatus km_exact_optimum(const struct KmInstance *instance, double *out_optimum);

// One seeded run. Ratios are reported when the exact optimum is computable.
enum KmStatus km_run_moea(const struct KmInstance *instance,
                          enum KmInit init,
                          const struct KmMoeaOptions *options,
                          struct KmTrajectory **out_trajectory);

enum KmStatus km_trajectory_len(const struct KmTrajectory *trajectory, size_t *out_len);

enum KmStatus km_trajectory_row(const struct KmTrajectory *trajectory,
                                size_t index,
                                struct KmTrajectoryRow *out_row);

enum KmStatus km_trajectory_write_csv(const struct KmTrajectory *trajectory, const char *path);

void km_trajectory_free(struct KmTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNAPSACK_MOEA_H */
