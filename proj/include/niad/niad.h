/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

/* C interface to the NIAD toolkit: Q-matrix identifiability analysis,
 * DINA/DINO marginal maximum likelihood estimation, and
 * non-identifiability-adjusted classification. All objects are opaque
 * handles; functions return NIAD_OK or an error code, with the message
 * available from niad_last_error() (thread local). Strings returned through
 * char** are heap allocated and must be released with niad_string_free(). */

#ifndef NIAD_H
#define NIAD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NIAD_OK = 0,
  NIAD_ERR_INVALID_ARGUMENT = 1,
  NIAD_ERR_PARSE = 2,
  NIAD_ERR_NUMERIC = 3,
  NIAD_ERR_IO = 4
} niad_status;

typedef enum { NIAD_LINK_DINA = 0, NIAD_LINK_DINO = 1 } niad_link;

typedef enum {
  NIAD_PRIOR_SATURATED = 0, /* NIAD: free mass per equivalence class */
  NIAD_PRIOR_INDEPENDENT = 1,
  NIAD_PRIOR_HIGHER_ORDER = 2,
  NIAD_PRIOR_RESTRICTED_HIGHER_ORDER = 3
} niad_prior_variant;

typedef struct niad_qmatrix niad_qmatrix;
typedef struct niad_partition niad_partition;
typedef struct niad_matrix niad_matrix; /* binary data, row major */
typedef struct niad_scenario niad_scenario;
typedef struct niad_fit niad_fit;
typedef struct niad_model niad_model;
typedef struct niad_classification niad_classification;

const char* niad_version(void);
const char* niad_last_error(void);
void niad_string_free(char* s);

/* ---- Q-matrix ---- */

/* entries: row-major items x attributes array of 0/1. */
niad_status niad_qmatrix_create(int items, int attributes, const int* entries,
                                niad_qmatrix** out);
niad_status niad_qmatrix_load_csv(const char* path, int has_header, niad_qmatrix** out);
int niad_qmatrix_items(const niad_qmatrix* q);
int niad_qmatrix_attributes(const niad_qmatrix* q);
/* Entry q_{jk} as 0/1, or -1 when out of range. */
int niad_qmatrix_get(const niad_qmatrix* q, int item, int attribute);
int niad_qmatrix_is_complete(const niad_qmatrix* q);
void niad_qmatrix_free(niad_qmatrix* q);

/* ---- Partition of the attribute profile space ---- */

niad_status niad_partition_build(const niad_qmatrix* q, niad_link link, niad_partition** out);
int niad_partition_num_classes(const niad_partition* p);
int niad_partition_class_size(const niad_partition* p, int c);
/* buf receives a bit string (attribute 1 leftmost); bufsize must cover K+1. */
niad_status niad_partition_class_min_rep(const niad_partition* p, int c, char* buf,
                                         size_t bufsize);
niad_status niad_partition_class_delta(const niad_partition* p, int c, char* buf, size_t bufsize);
niad_status niad_partition_to_json(const niad_partition* p, char** out);
/* Text table of classes, sizes, delta, and (with a fit) estimated nu. */
niad_status niad_partition_table(const niad_partition* p, const niad_fit* fit_or_null,
                                 char** out);
void niad_partition_free(niad_partition* p);

/* ---- Binary matrices (responses, profiles) ---- */

niad_status niad_matrix_load_csv(const char* path, niad_matrix** out);
int niad_matrix_rows(const niad_matrix* m);
int niad_matrix_cols(const niad_matrix* m);
int niad_matrix_get(const niad_matrix* m, int row, int col);
niad_status niad_matrix_to_csv(const niad_matrix* m, char** out);
void niad_matrix_free(niad_matrix* m);

/* ---- Scenarios and simulation ---- */

/* Built-in names: "paper-sim", "fraction-q". n/seed of 0 keep defaults. */
niad_status niad_scenario_builtin(const char* name, int n, uint64_t seed, niad_scenario** out);
niad_status niad_scenario_load_json(const char* path, niad_scenario** out);
niad_status niad_scenario_to_json(const niad_scenario* sc, char** out);
niad_status niad_scenario_qmatrix(const niad_scenario* sc, niad_qmatrix** out);
/* Draws the population and the responses; both deterministic in the seed. */
niad_status niad_scenario_simulate(const niad_scenario* sc, niad_matrix** profiles,
                                   niad_matrix** responses);
void niad_scenario_free(niad_scenario* sc);

/* ---- Estimation ---- */

typedef struct {
  int max_iterations;          /* default 2000 */
  double tolerance;            /* relative log-likelihood change, default 1e-8 */
  int restarts;                /* default 10 */
  uint64_t seed;               /* default 0 */
  int estimate_items;          /* default 1; 0 holds slip/guess fixed */
  const char* fixed_items_json; /* {"slip":[...],"guess":[...]}; NULL to estimate */
} niad_em_options;

void niad_em_options_init(niad_em_options* opts);

niad_status niad_fit_run(const niad_qmatrix* q, const niad_matrix* data,
                         niad_prior_variant variant, niad_link link,
                         const niad_em_options* opts, niad_fit** out);
double niad_fit_loglik(const niad_fit* f);
double niad_fit_aic(const niad_fit* f);
double niad_fit_bic(const niad_fit* f);
int niad_fit_n_params(const niad_fit* f);
int niad_fit_n_params_unreduced(const niad_fit* f);
int niad_fit_converged(const niad_fit* f);
int niad_fit_iterations(const niad_fit* f);
niad_status niad_fit_to_json(const niad_fit* f, char** out);
niad_status niad_fit_model(const niad_fit* f, niad_model** out);
void niad_fit_free(niad_fit* f);

/* Parameter counts without fitting (reduced per variant; unreduced 2J+2^K). */
niad_status niad_parameter_count(const niad_qmatrix* q, niad_prior_variant variant,
                                 niad_link link, int* out);
niad_status niad_parameter_count_unreduced(const niad_qmatrix* q, int* out);

/* ---- Models ---- */

niad_status niad_model_from_fit_json(const niad_qmatrix* q, const char* json, niad_model** out);
/* Saturated model at the scenario's true parameters. */
niad_status niad_model_true_from_scenario(const niad_scenario* sc, niad_model** out);
void niad_model_free(niad_model* m);

/* ---- Classification ---- */

niad_status niad_classify_run(const niad_model* m, const niad_matrix* data, double cutoff,
                              niad_classification** out);
niad_status niad_classification_to_csv(const niad_classification* c, char** out);
/* Per-attribute unclassified rates; misclassification rates when truth given. */
niad_status niad_classification_summary(const niad_classification* c,
                                        const niad_matrix* truth_or_null, char** out);
void niad_classification_free(niad_classification* c);

/* ---- Identifiability evaluation ---- */

niad_status niad_zeta_json(const niad_model* m, char** out);
/* slip/guess are length-J arrays. identifiable is 1 iff rank == L. */
niad_status niad_rank_check(const niad_qmatrix* q, const double* slip, const double* guess,
                            niad_link link, int* rank, int* num_classes, int* identifiable);
niad_status niad_tmatrix_csv(const niad_qmatrix* q, const double* slip, const double* guess,
                             niad_link link, char** out);
/* T-matrix at the model's fitted item parameters. */
niad_status niad_model_tmatrix_csv(const niad_model* m, char** out);
/* Completeness verdict, zeta, rank check, never-identifiable attributes. */
niad_status niad_evaluate_report(const niad_model* m, char** out);

#ifdef __cplusplus
}
#endif

#endif /* NIAD_H */
