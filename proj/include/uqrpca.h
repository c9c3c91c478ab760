/*
 * uqrpca public C API.
 *
 * The library decomposes a static-camera color video into a rank-1
 * quaternion background, a denoised moving-target component, and a noise
 * component, refines the background to per-channel rank 1, and ships the
 * matching evaluation metrics and a low-rank-update benchmark.
 *
 * All functions return uq_status; UQ_OK is 0. On failure, uq_last_error()
 * returns a thread-local description of the most recent error. Objects are
 * created through uq_*_create/load factories and released with the matching
 * uq_*_destroy; handles are opaque.
 */
#ifndef UQRPCA_H
#define UQRPCA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uq_status {
  UQ_OK = 0,
  UQ_ERR_ARG = 1,      /* invalid argument or configuration */
  UQ_ERR_IO = 2,       /* file system or codec failure */
  UQ_ERR_SHAPE = 3,    /* dimension mismatch */
  UQ_ERR_NUMERIC = 4,  /* numerical failure */
  UQ_ERR_INTERNAL = 5
} uq_status;

typedef struct uq_config uq_config;
typedef struct uq_video uq_video;
typedef struct uq_result uq_result;

const char* uq_version(void);

/* Thread-local message for the most recent failing call on this thread. */
const char* uq_last_error(void);

/* Worker threads for data-parallel stages; 0 selects the hardware count. */
uq_status uq_set_threads(int n);

/* ---- configuration -------------------------------------------------- */

uq_status uq_config_create(uq_config** out);
void uq_config_destroy(uq_config* cfg);

/* Keys are the documented configuration names; unknown keys are rejected. */
uq_status uq_config_set(uq_config* cfg, const char* key, const char* value);
uq_status uq_config_get(const uq_config* cfg, const char* key, char* buf, size_t buflen);

/* Load a `key = value` file ('#' comments); values override the defaults. */
uq_status uq_config_load_file(uq_config* cfg, const char* path);

/* Iterate the registry: returns nonzero while a key exists at `index` and
 * fills name/default/description pointers (static storage). */
int uq_config_key_info(size_t index, const char** name, const char** default_value,
                       const char** description);

/* ---- video ---------------------------------------------------------- */

/* Load every PNG/JPG frame in a directory in lexicographic filename order.
 * resize_w/resize_h of 0 keep the native size. */
uq_status uq_video_load(const char* dir, int resize_w, int resize_h, uq_video** out);
uq_status uq_video_dims(const uq_video* v, int* m, int* n, int* t);
void uq_video_destroy(uq_video* v);

/* ---- decomposition -------------------------------------------------- */

typedef void (*uq_progress_fn)(int iter, int total, double primal_residual,
                               double coupling_residual, void* user);

uq_status uq_decompose(const uq_video* v, const uq_config* cfg, uq_progress_fn progress,
                       void* user, uq_result** out);

uq_status uq_result_iterations(const uq_result* r, int* iters);
uq_status uq_result_residual(const uq_result* r, int iter, double* primal, double* coupling);

/* Write background/, mask/, sparse/, noise/, target/ frame trees plus
 * manifest.json (config echo and residual log included) under out_dir. */
uq_status uq_result_save(const uq_result* r, const uq_config* cfg, const char* out_dir);

void uq_result_destroy(uq_result* r);

/* ---- evaluation ----------------------------------------------------- */

/* task is "detection" or "background". json_path/csv_path may be NULL to
 * skip a report. The aggregate row is copied into summary when non-NULL. */
uq_status uq_evaluate(const char* task, const char* pred_dir, const char* gt_dir,
                      const char* json_path, const char* csv_path, double tau,
                      int frame_average, char* summary, size_t summary_len);

/* ---- synthesis ------------------------------------------------------ */

/* Per-pixel composite: mask ? frame : background image. */
uq_status uq_synthesize(const char* frames_dir, const char* mask_dir,
                        const char* background_image, const char* out_dir);

/* ---- benchmark ------------------------------------------------------ */

/* Writes "cols,qsvd_s,fwr1_s" CSV to csv_path. Returns UQ_ERR_NUMERIC when
 * the cross-path agreement gate fails for any size. */
uq_status uq_bench(int64_t rows, const int64_t* cols, size_t ncols, int iters, uint64_t seed,
                   const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* UQRPCA_H */
