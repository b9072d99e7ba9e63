/*
  Copyright (c) SDBE project contributors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

/*
  SDBE public C API.

  SDBE recovers an estimate of a clean feature vector from an
  occlusion-corrupted one by decomposing the corrupted vector over a
  concatenated dictionary [A B] (class dictionary A, occlusion-error
  dictionary B) with l1 or squared-l2 regularization, keeping the class
  part A*alpha, and handing it to an ordinary classifier.

  Conventions:
  - All functions returning sdbe_status return SDBE_OK (0) on success; any
    other value is the error category, and sdbe_last_error() returns a
    thread-local human-readable message for the most recent failure on the
    calling thread.
  - Feature matrices are column-major, one sample per column.
  - Output handles (**out parameters) are written only on success; free
    them with the matching *_free function. Strings returned through
    char** are freed with sdbe_string_free.
*/

#ifndef SDBE_SDBE_H
#define SDBE_SDBE_H

#include <stddef.h>
#include <stdint.h>

#ifndef SDBE_API
#define SDBE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ---- status codes ---------------------------------------------------- */

typedef enum sdbe_status {
  SDBE_OK = 0,
  SDBE_E_INVALID_ARGUMENT = 1,
  SDBE_E_DIMENSION_MISMATCH = 2,
  SDBE_E_ZERO_VECTOR = 3,
  SDBE_E_LABEL_MISMATCH = 4,
  SDBE_E_EMPTY_INPUT = 5,
  SDBE_E_NOT_CONVERGED = 6,
  SDBE_E_WRONG_MODE = 7,
  SDBE_E_NUMERICAL_FAILURE = 8,
  SDBE_E_CONSTANT_VECTOR = 9,
  SDBE_E_DEGENERATE_LABELS = 10,
  SDBE_E_INFEASIBLE_SPEC = 11,
  SDBE_E_IO = 12,
  SDBE_E_BAD_MAGIC = 13,
  SDBE_E_TRUNCATED_HEADER = 14,
  SDBE_E_TRUNCATED_PAYLOAD = 15,
  SDBE_E_TRAILING_BYTES = 16,
  SDBE_E_LABEL_COUNT_MISMATCH = 17,
  SDBE_E_NAN_PAYLOAD = 18,
  SDBE_E_BAD_CONFIG = 19,
  SDBE_E_UNKNOWN = 20
} sdbe_status;

/* Stable category name, e.g. "DimensionMismatch". */
SDBE_API const char* sdbe_status_name(sdbe_status status);

/* Message for the most recent failure on this thread; never NULL. */
SDBE_API const char* sdbe_last_error(void);

SDBE_API void sdbe_string_free(char* s);

/* ---- labeled feature sets -------------------------------------------- */

typedef struct sdbe_features sdbe_features;

/* data: dim*count doubles, column-major; labels: count int32 (may be NULL
   for all-zero labels). */
SDBE_API sdbe_status sdbe_features_create(const double* data, size_t dim,
                                          size_t count, const int32_t* labels,
                                          sdbe_features** out);
SDBE_API sdbe_status sdbe_features_load(const char* path, sdbe_features** out);
SDBE_API sdbe_status sdbe_features_load_csv(const char* path,
                                            sdbe_features** out);
SDBE_API sdbe_status sdbe_features_save(const sdbe_features* f,
                                        const char* path);
SDBE_API size_t sdbe_features_dim(const sdbe_features* f);
SDBE_API size_t sdbe_features_count(const sdbe_features* f);
/* out must hold dim*count doubles / count int32s. */
SDBE_API sdbe_status sdbe_features_copy_data(const sdbe_features* f,
                                             double* out);
SDBE_API sdbe_status sdbe_features_copy_labels(const sdbe_features* f,
                                               int32_t* out);
SDBE_API void sdbe_features_free(sdbe_features* f);

/* ---- dictionary construction ------------------------------------------ */

/* Class dictionary: training features reordered into contiguous label
   groups (stable within a group); optionally column-normalized. */
SDBE_API sdbe_status sdbe_build_cd(const sdbe_features* train, int normalize,
                                   sdbe_features** out);

/* Occlusion-error dictionary: per-column differences occluded - free of two
   paired sets sharing pattern labels; optionally column-normalized. */
SDBE_API sdbe_status sdbe_build_oed(const sdbe_features* occluded,
                                    const sdbe_features* free_of_occlusion,
                                    int normalize, sdbe_features** out);

/* ---- model fitting and estimation ------------------------------------- */

typedef struct sdbe_model sdbe_model;

enum { SDBE_MODE_L1 = 1, SDBE_MODE_L2 = 2 };

typedef struct sdbe_fit_options {
  int mode;               /* SDBE_MODE_L1 or SDBE_MODE_L2 */
  double lambda;          /* regularization weight, > 0 */
  int normalize_columns;  /* l2-normalize dictionary columns at fit */
  int normalize_query;    /* l2-normalize each query before solving */
  int normalize_output;   /* l2-normalize the estimate */
  double kkt_tol;         /* l1 stopping tolerance */
  int64_t max_iters;      /* l1 iteration cap */
} sdbe_fit_options;

/* Fills in the defaults: L2, lambda 0.005, all normalization on. */
SDBE_API void sdbe_fit_options_init(sdbe_fit_options* options);

/* oed may be NULL for an empty error dictionary; options NULL means the
   defaults of sdbe_fit_options_init. */
SDBE_API sdbe_status sdbe_fit(const sdbe_features* cd,
                              const sdbe_features* oed,
                              const sdbe_fit_options* options,
                              sdbe_model** out);

SDBE_API sdbe_status sdbe_model_save(const sdbe_model* model,
                                     const char* path);
SDBE_API sdbe_status sdbe_model_load(const char* path, sdbe_model** out);

/* Collapses an L2 model into the single linear map W = A * P_alpha. The
   result is a model handle in compiled form; it estimates but cannot be
   compiled again. */
SDBE_API sdbe_status sdbe_compile(const sdbe_model* model, sdbe_model** out);
SDBE_API int sdbe_model_is_compiled(const sdbe_model* model);
SDBE_API size_t sdbe_model_dim(const sdbe_model* model);

typedef struct sdbe_estimate_info {
  int64_t iterations;    /* l1 solver iterations (0 for l2/compiled) */
  double kkt_residual;   /* l1 optimality certificate (0 for l2/compiled) */
  int converged;         /* 1 unless the l1 solver hit its iteration cap */
  double residual_norm;  /* |v_used - D omega| (0 for compiled) */
  int64_t alpha_nnz;     /* exact nonzeros in alpha (0 for compiled) */
  int64_t beta_nnz;      /* exact nonzeros in beta (0 for compiled) */
} sdbe_estimate_info;

/* v: dim doubles in, v0_hat: dim doubles out. info may be NULL. */
SDBE_API sdbe_status sdbe_estimate(const sdbe_model* model, const double* v,
                                   size_t dim, double* v0_hat,
                                   sdbe_estimate_info* info);

/* Estimates every column; labels are copied through. csv (optional)
   receives the per-query diagnostics table, whose coefficient-sparsity
   columns count entries with magnitude > tau (tau 0 = exact nonzeros). */
SDBE_API sdbe_status sdbe_estimate_batch(const sdbe_model* model,
                                         const sdbe_features* queries,
                                         double tau, sdbe_features** estimates,
                                         char** csv);

SDBE_API void sdbe_model_free(sdbe_model* model);

/* ---- classifiers ------------------------------------------------------ */

/* Label of the Euclidean-nearest prototype column; ties break to the
   lowest prototype index. */
SDBE_API sdbe_status sdbe_nn_classify(const sdbe_features* prototypes,
                                      const double* v, size_t dim,
                                      int32_t* label);

/* with_truth nonzero includes the query labels in the true_label column. */
SDBE_API sdbe_status sdbe_nn_classify_batch(const sdbe_features* prototypes,
                                            const sdbe_features* queries,
                                            int with_truth, char** csv);

typedef struct sdbe_softmax sdbe_softmax;

SDBE_API sdbe_status sdbe_softmax_train(const sdbe_features* train,
                                        double learning_rate, int64_t epochs,
                                        double l2_penalty, sdbe_softmax** out);
SDBE_API sdbe_status sdbe_softmax_load_csv(const char* path,
                                           sdbe_softmax** out);
SDBE_API size_t sdbe_softmax_classes(const sdbe_softmax* clf);
/* probabilities may be NULL; otherwise it must hold one double per class. */
SDBE_API sdbe_status sdbe_softmax_classify(const sdbe_softmax* clf,
                                           const double* v, size_t dim,
                                           int32_t* label,
                                           double* probabilities);
SDBE_API sdbe_status sdbe_softmax_classify_batch(const sdbe_softmax* clf,
                                                 const sdbe_features* queries,
                                                 int with_truth, char** csv);
SDBE_API void sdbe_softmax_free(sdbe_softmax* clf);

/* ---- synthetic worlds -------------------------------------------------- */

typedef struct sdbe_world sdbe_world;

typedef struct sdbe_world_spec {
  uint64_t seed;
  int64_t m;
  int64_t k_classes;
  int64_t class_dim;
  int64_t k_patterns;
  int64_t pattern_dim;
  int64_t train_per_class;
  int64_t queries_per_class;
  int64_t pairs_per_pattern;
  double occlusion_energy;
  double noise_sigma;
  double overlap;
  int nonneg_features;
  int idealized;
} sdbe_world_spec;

/* Fills in the default world shape (see the CLI synth defaults). */
SDBE_API void sdbe_world_spec_init(sdbe_world_spec* spec);

SDBE_API sdbe_status sdbe_world_generate(const sdbe_world_spec* spec,
                                         sdbe_world** out);

enum {
  SDBE_WORLD_TRAIN = 0,
  SDBE_WORLD_PAIRS_FREE = 1,
  SDBE_WORLD_PAIRS_OCCLUDED = 2,
  SDBE_WORLD_QUERIES_CLEAN = 3,
  SDBE_WORLD_QUERIES_OCCLUDED = 4,
  SDBE_WORLD_QUERY_EPS = 5 /* exact occlusion errors, pattern-id labels */
};

SDBE_API sdbe_status sdbe_world_features(const sdbe_world* world, int which,
                                         sdbe_features** out);
SDBE_API void sdbe_world_free(sdbe_world* world);

/* ---- diagnostics and evaluation ---------------------------------------- */

/* Pearson cross-correlation table between cd and oed columns, as CSV. */
SDBE_API sdbe_status sdbe_corr_csv(const sdbe_features* cd,
                                   const sdbe_features* oed, int bins,
                                   char** csv);

/* Runs the evaluation protocol described by a key=value config text and
   returns the report CSV. out_path (optional) receives the config's "out"
   destination, empty when the config wants stdout. */
SDBE_API sdbe_status sdbe_eval_csv(const char* config_text, char** csv,
                                   char** out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SDBE_SDBE_H */
