/* C interface to the fsel library.
 *
 * Every function returns an fsel_status; on failure fsel_last_error() holds a
 * message for the calling thread. Handles are opaque and owned by the caller,
 * who releases them with the matching *_free function (NULL is accepted).
 */
#ifndef FSEL_FSEL_H
#define FSEL_FSEL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FSEL_BUILDING_LIBRARY)
#define FSEL_API __attribute__((visibility("default")))
#else
#define FSEL_API
#endif

typedef enum fsel_status {
  FSEL_OK = 0,
  FSEL_ERR_USAGE = 2,      /* unknown key or experiment, bad call sequence */
  FSEL_ERR_VALIDATION = 3, /* malformed value or violated precondition */
  FSEL_ERR_IO = 4,         /* file could not be read or written */
  FSEL_ERR_NUMERICAL = 5,  /* non-finite objective or closed form */
  FSEL_ERR_INTERNAL = 6
} fsel_status;

typedef struct fsel_config fsel_config;
typedef struct fsel_result fsel_result;
typedef struct fsel_dataset fsel_dataset;

typedef struct fsel_dataset_info {
  uint32_t n_samples;
  uint32_t dim;
  uint32_t n_classes;
  int has_groups;
  uint32_t n_groups; /* distinct group ids, or n_samples without groups */
} fsel_dataset_info;

FSEL_API const char* fsel_version(void);

/* Message of the last failed call on this thread ("" if none). */
FSEL_API const char* fsel_last_error(void);

/* Human-readable name of a status code. */
FSEL_API const char* fsel_status_name(fsel_status status);

/* ---- configuration ----------------------------------------------------
 * Keys (value syntax in parentheses, lists are comma separated):
 *   preset (bench | redundancy512 | hetero), spec (path), data (path),
 *   seed (u64), tasks, ways (list), shots (list), query, keep (list),
 *   adjust (none | oracle | estimated | estimated-augmented),
 *   classifier (ncc | logreg), rank (oracle | estimated),
 *   eval (sampled | exact), eval_query, large_shot, views, rho, view_bias,
 *   epsilon, draws, k, lambda, max_iters, tolerance, workers,
 *   progress (bool), frozen_meta (bool), classes, samples.
 * Unknown keys fail with FSEL_ERR_USAGE, unparsable values with
 * FSEL_ERR_VALIDATION. */
FSEL_API fsel_status fsel_config_new(fsel_config** out);
FSEL_API void fsel_config_free(fsel_config* cfg);
FSEL_API fsel_status fsel_config_set(fsel_config* cfg, const char* key, const char* value);

/* Effective value of a key (set value or default for `experiment`, which may
 * be NULL). The returned pointer stays valid until the next call on cfg. */
FSEL_API fsel_status fsel_config_get(fsel_config* cfg, const char* experiment,
                                     const char* key, const char** value);

/* ---- experiments ------------------------------------------------------
 * experiment: table1, thm1-check, thm1-verify, thm2-gap, mask-sweep,
 * wayshot-grid, fi-quality, topk-freq, adjust-eval, ffsb-info. A NULL cfg
 * runs with every key at its default. */
FSEL_API fsel_status fsel_run(const char* experiment, const fsel_config* cfg,
                              fsel_result** out);

FSEL_API void fsel_result_free(fsel_result* result);
FSEL_API size_t fsel_result_rows(const fsel_result* result);
FSEL_API size_t fsel_result_cols(const fsel_result* result);
/* NULL when out of range. Strings live as long as the result. */
FSEL_API const char* fsel_result_column(const fsel_result* result, size_t col);
FSEL_API const char* fsel_result_cell(const fsel_result* result, size_t row, size_t col);
FSEL_API fsel_status fsel_result_number(const fsel_result* result, size_t row, size_t col,
                                        double* value);
FSEL_API size_t fsel_result_meta_count(const fsel_result* result);
FSEL_API const char* fsel_result_meta_key(const fsel_result* result, size_t i);
FSEL_API const char* fsel_result_meta_value(const fsel_result* result, size_t i);

/* format: "csv" or "json". */
FSEL_API fsel_status fsel_result_write(const fsel_result* result, const char* path,
                                       const char* format);
FSEL_API fsel_status fsel_result_write_metadata(const fsel_result* result, const char* path);

/* ---- feature files ----------------------------------------------------- */
FSEL_API fsel_status fsel_dataset_open(const char* path, fsel_dataset** out);
FSEL_API void fsel_dataset_free(fsel_dataset* dataset);
FSEL_API fsel_status fsel_dataset_info_get(const fsel_dataset* dataset, fsel_dataset_info* info);

/* Samples a labeled FFSB file from the configured Gaussian spec: `classes`
 * classes with means spaced evenly between mean_a and mean_b, `samples` base
 * rows per class and `views` jittered views per row (groups when > 0). */
FSEL_API fsel_status fsel_synthesize_ffsb(const fsel_config* cfg, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* FSEL_FSEL_H */
