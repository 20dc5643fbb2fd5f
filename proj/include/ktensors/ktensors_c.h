/*
 * C interface to the ktensors library.
 *
 * Objects are opaque handles created by kt_*_create/load/simulate/fit and
 * released with the matching kt_*_destroy. Every fallible call returns a
 * kt_status; on failure kt_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on that thread).
 * Matrices cross the boundary as row-major arrays of p*p doubles.
 */
#ifndef KTENSORS_C_H
#define KTENSORS_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KT_API __declspec(dllexport)
#else
#define KT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kt_status {
  KT_OK = 0,
  KT_ERR_NOT_SQUARE = 1,
  KT_ERR_NOT_PSD = 2,
  KT_ERR_NOT_ORTHONORMAL = 3,
  KT_ERR_NEGATIVE_VALUE = 4,
  KT_ERR_DIM_MISMATCH = 5,
  KT_ERR_CONVERGENCE = 6,
  KT_ERR_EMPTY_FRAME_SET = 7,
  KT_ERR_EMPTY_SAMPLE = 8,
  KT_ERR_SINGULAR = 9,
  KT_ERR_SINGULAR_AFTER_RIDGE = 10,
  KT_ERR_TOO_FEW_OBSERVATIONS = 11,
  KT_ERR_INVALID_CONFIG = 12,
  KT_ERR_LENGTH_MISMATCH = 13,
  KT_ERR_EMPTY_RECORDS = 14,
  KT_ERR_INTERNAL = 15,
  KT_ERR_IO = 16,
  KT_ERR_PARSE = 17,
  KT_ERR_INVALID_ARGUMENT = 100,
  KT_ERR_UNKNOWN = 101
} kt_status;

typedef struct kt_sample kt_sample;
typedef struct kt_model kt_model;

KT_API const char* kt_version(void);
KT_API const char* kt_last_error(void);
KT_API const char* kt_status_name(kt_status status);

/* ---- simulation and samples ---- */

typedef struct kt_scenario {
  const char* generator; /* "cook" or "wishart" */
  int p;
  int n_per_cluster;
  int k;
  double noise_level;    /* cook: Frobenius norm of each noise matrix */
  int df;                /* wishart degrees of freedom */
  double separation;     /* 0..1 */
  double eig_lo;
  double eig_hi;
  uint64_t seed;
} kt_scenario;

KT_API void kt_scenario_default(kt_scenario* out);
KT_API kt_status kt_sample_simulate(const kt_scenario* scenario, kt_sample** out);
/* n matrices of size p x p, stored back to back in row-major order. */
KT_API kt_status kt_sample_from_matrices(const double* data, size_t n, int p, kt_sample** out);
KT_API kt_status kt_sample_load(const char* path, kt_sample** out);
KT_API kt_status kt_sample_save(const kt_sample* sample, const char* path);
KT_API void kt_sample_destroy(kt_sample* sample);

KT_API size_t kt_sample_size(const kt_sample* sample);
KT_API int kt_sample_dim(const kt_sample* sample);
KT_API int kt_sample_has_labels(const kt_sample* sample);
KT_API kt_status kt_sample_labels(const kt_sample* sample, int* out, size_t len);
KT_API kt_status kt_sample_matrix(const kt_sample* sample, size_t index, double* out);
/* Resolved scenario configuration as JSON, owned by the handle; NULL when
 * the sample was not simulated and carried no config. */
KT_API const char* kt_sample_config_json(const kt_sample* sample);

/* ---- fitting ---- */

typedef struct kt_fit_options {
  int k;
  const char* algorithm;  /* lloyd | fast | hartigan | euclidean | affine_invariant | log_det */
  const char* cpc_solver; /* fg | fast (lloyd only) */
  int restarts;
  int max_iter;
  double tol;
  uint64_t seed;
} kt_fit_options;

KT_API void kt_fit_options_default(kt_fit_options* out);
KT_API kt_status kt_fit(const kt_sample* sample, const kt_fit_options* options, kt_model** out);
KT_API kt_status kt_model_load(const char* path, kt_model** out);
KT_API kt_status kt_model_save(const kt_model* model, const char* path);
KT_API void kt_model_destroy(kt_model* model);

KT_API const char* kt_model_method(const kt_model* model);
KT_API int kt_model_k(const kt_model* model);
KT_API size_t kt_model_size(const kt_model* model);
KT_API double kt_model_loss(const kt_model* model);
KT_API int kt_model_iterations(const kt_model* model);
KT_API int kt_model_converged(const kt_model* model);
KT_API kt_status kt_model_assignments(const kt_model* model, int* out, size_t len);
/* Per-cluster stationarity residual of K-Tensors frames on their members;
 * len must be kt_model_k(). KT_ERR_INVALID_ARGUMENT for baseline models. */
KT_API kt_status kt_model_stationarity(const kt_model* model, double* out, size_t len);

/* ---- evaluation ---- */

KT_API kt_status kt_evaluate(const int* pred, const int* truth, size_t n, int k, double* accuracy,
                             double* ari);

/* ---- benchmark ---- */

typedef struct kt_bench_options {
  const char* grid;    /* table1 | table2 */
  const char* methods; /* "all" or comma-separated method names */
  int replications;
  uint64_t seed;
  int threads;
  int restarts;
  int max_iter;
  const char* out_dir; /* receives results.csv, summary.csv, plot.csv */
} kt_bench_options;

KT_API void kt_bench_options_default(kt_bench_options* out);
KT_API kt_status kt_bench_run(const kt_bench_options* options, size_t* records_written);

/* ---- geometry ---- */

KT_API kt_status kt_projection_index(const double* psi, const double* frame, int p, double* index_out,
                                     double* residual_out);
/* metric: euclidean | affine_invariant | log_det (ridge 1e-8 relative). */
KT_API kt_status kt_distance(const char* metric, const double* a, const double* b, int p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* KTENSORS_C_H */
