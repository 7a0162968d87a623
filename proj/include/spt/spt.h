/* C interface to the spt kernels. All functions return an spt_status; on
 * failure spt_last_error() describes the problem (per thread). Strings
 * returned through char** are owned by the caller and released with
 * spt_string_free(). */
#ifndef SPT_SPT_H
#define SPT_SPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPT_BUILDING_LIBRARY)
#define SPT_API __attribute__((visibility("default")))
#else
#define SPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct spt_context spt_context;
typedef struct spt_matrix spt_matrix;
typedef struct spt_tensor spt_tensor;

typedef enum spt_status {
  SPT_OK = 0,
  SPT_E_INVALID_ARGUMENT = 1,
  SPT_E_SHAPE_MISMATCH = 2,
  SPT_E_DEGENERATE_SPLIT = 3,
  SPT_E_INVALID_PLANES = 4,
  SPT_E_UNSUPPORTED = 5,
  SPT_E_IO = 6,
  SPT_E_CONFIG = 7,
  SPT_E_RACE = 8,
  SPT_E_INTERNAL = 9
} spt_status;

typedef enum spt_scalar { SPT_SCALAR_INT = 0, SPT_SCALAR_F64 = 1 } spt_scalar;

typedef struct spt_kernel_config {
  int64_t mm_base;  /* MM recursion stops at this side (default 8) */
  int64_t block;    /* reducer block B (default 8) */
  int64_t tc_base;  /* TC recursion stops at this footprint (default 512) */
  int inject_plane_overlap; /* testing: overlap sibling plane ranges */
} spt_kernel_config;

typedef enum spt_exec_mode { SPT_EXEC_INSTRUMENTED = 0, SPT_EXEC_PARALLEL = 1 } spt_exec_mode;

typedef struct spt_run_options {
  spt_exec_mode mode;
  int threads;          /* parallel mode only */
  int check_races;      /* reject racy task trees before running */
  int64_t cache_words;  /* M; 0 disables the cache simulator */
  int64_t line_words;   /* B */
  const char* trace_path; /* instrumented mode: write the access trace here */
} spt_run_options;

typedef struct spt_metrics {
  int64_t work;
  int64_t span;
  int64_t peak_space;
  int64_t forks;
  int64_t madds;
  int64_t cache_misses;
  int64_t accesses;
  int planes;
  double seconds;
} spt_metrics;

/* One kernel invocation for spt_cachescan_csv. Unused fields are ignored. */
typedef struct spt_cell {
  const char* kernel;
  int64_t n;
  int r;
  int64_t processors;
  int64_t a, b, c;
  int u, v, x;
  const char* u_labels; /* e.g. "i1,k1,i2,k2"; NULL for the canonical layout */
  const char* v_labels;
  int flatten_row_major;
} spt_cell;

typedef struct spt_verify_options {
  const char* kernel; /* NULL or "all" for every kernel */
  int64_t n;          /* 0: full grid */
  int r;              /* 0: every legal r */
  int64_t processors; /* mm-tradeoff; 0: default sweep */
  int u, v, x;        /* 0: default contraction grid */
  const char* u_labels;
  const char* v_labels;
  spt_kernel_config config;
  uint64_t seed;
  spt_scalar scalar;
} spt_verify_options;

typedef struct spt_predict_params {
  int64_t n, r;
  int u, v, x;
  int64_t a, b, c;
  int64_t cache_words, line_words;
} spt_predict_params;

typedef struct spt_prediction {
  double t1, tinf, sinf, q1;
  char note[64];
} spt_prediction;

SPT_API const char* spt_last_error(void);
SPT_API const char* spt_status_string(spt_status status);
SPT_API void spt_string_free(char* s);

SPT_API void spt_kernel_config_default(spt_kernel_config* cfg);
SPT_API void spt_run_options_default(spt_run_options* opts);
SPT_API void spt_verify_options_default(spt_verify_options* opts);
SPT_API void spt_cell_default(spt_cell* cell);

SPT_API spt_status spt_context_create(spt_scalar scalar, const spt_kernel_config* cfg, spt_context** out);
SPT_API void spt_context_destroy(spt_context* ctx);
SPT_API spt_status spt_context_set_config(spt_context* ctx, const spt_kernel_config* cfg);

SPT_API spt_status spt_matrix_create(spt_context* ctx, int64_t rows, int64_t cols, spt_matrix** out);
SPT_API void spt_matrix_destroy(spt_matrix* m);
SPT_API spt_status spt_matrix_fill_random(spt_matrix* m, uint64_t seed);
SPT_API spt_status spt_matrix_get(const spt_matrix* m, int64_t i, int64_t j, double* out);
SPT_API spt_status spt_matrix_set(spt_matrix* m, int64_t i, int64_t j, double value);
SPT_API spt_status spt_matrix_equal(const spt_matrix* a, const spt_matrix* b, int* equal);

SPT_API spt_status spt_tensor_create(spt_context* ctx, int order, int64_t side, spt_tensor** out);
SPT_API void spt_tensor_destroy(spt_tensor* t);
SPT_API spt_status spt_tensor_shape(const spt_tensor* t, int* order, int64_t* side);
SPT_API spt_status spt_tensor_fill_random(spt_tensor* t, uint64_t seed);
SPT_API spt_status spt_tensor_get(const spt_tensor* t, const int64_t* index, double* out);
SPT_API spt_status spt_tensor_set(spt_tensor* t, const int64_t* index, double value);
SPT_API spt_status spt_tensor_equal(const spt_tensor* a, const spt_tensor* b, int* equal);
SPT_API spt_status spt_tensor_load(spt_context* ctx, const char* path, spt_tensor** out);
SPT_API spt_status spt_tensor_save(const spt_tensor* t, const char* path);

/* X = U * V. algo: loop, mm, mm-hd, mm-opt, mm-nd, mm-ns, mm-tradeoff, rmm,
 * rmm-opt. `r` is the plane count for the hybrid kernels, `processors` the
 * processor count for mm-tradeoff. `opts` and `metrics` may be NULL. */
SPT_API spt_status spt_mm_run(spt_context* ctx, const char* algo, spt_matrix* x, const spt_matrix* u,
                              const spt_matrix* v, int r, int64_t processors, const spt_run_options* opts,
                              spt_metrics* metrics);

/* X = contraction of U and V. algo: loop, tc, tc-hs, tc-mm-opt. Labels
 * name U's and V's axes (NULL for the canonical layout, in which case the
 * orders of the tensors determine u, v and x). */
SPT_API spt_status spt_tc_run(spt_context* ctx, const char* algo, spt_tensor* x, const spt_tensor* u,
                              const spt_tensor* v, const char* u_labels, const char* v_labels, int r,
                              int flatten_row_major, const spt_run_options* opts, spt_metrics* metrics);

SPT_API spt_status spt_verify(const spt_verify_options* opts, char** csv, int* cells, int* failures);
SPT_API spt_status spt_tradeoff_csv(int64_t n, const int* rs, size_t count, int64_t cache_words, int64_t line_words,
                                    const spt_kernel_config* cfg, char** csv);
SPT_API spt_status spt_cachescan_csv(const spt_cell* cell, const int64_t* caches, size_t count, int64_t line_words,
                                     const spt_kernel_config* cfg, uint64_t seed, char** csv);
SPT_API spt_status spt_cachesim_file(const char* trace_path, int64_t cache_words, int64_t line_words,
                                     int64_t* misses, int64_t* accesses);
SPT_API spt_status spt_predict(const char* algo, const spt_predict_params* params, spt_prediction* out);

#ifdef __cplusplus
}
#endif

#endif
