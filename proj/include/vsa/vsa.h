#ifndef VSA_VSA_H
#define VSA_VSA_H

/* C interface to the vsa library. Every function returns a status code;
 * on failure vsa_last_error() describes the error for the calling thread.
 * Handles are opaque and must be released with the matching _free call. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define VSA_API __attribute__((visibility("default")))
#else
#define VSA_API
#endif

typedef enum vsa_status {
  VSA_OK = 0,
  VSA_ERR_INVALID_ARGUMENT = 1,
  VSA_ERR_DIMENSION = 2,
  VSA_ERR_CONFIG = 3,
  VSA_ERR_NUMERICAL = 4,
  VSA_ERR_IO = 5,
  VSA_ERR_INTERNAL = 6
} vsa_status;

VSA_API const char* vsa_version(void);
/* Message of the most recent failure on this thread; "" if none. */
VSA_API const char* vsa_last_error(void);
VSA_API const char* vsa_status_name(vsa_status status);

/* --- configuration ------------------------------------------------------ */

typedef struct vsa_config vsa_config;

VSA_API vsa_status vsa_config_create(vsa_config** out);
VSA_API void vsa_config_free(vsa_config* cfg);
/* Merges a key = value file; later entries override earlier ones. */
VSA_API vsa_status vsa_config_load(vsa_config* cfg, const char* path);
VSA_API vsa_status vsa_config_set(vsa_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated); *needed gets the full length + 1. */
VSA_API vsa_status vsa_config_get(const vsa_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);

/* --- experiments -------------------------------------------------------- */

VSA_API size_t vsa_experiment_count(void);
VSA_API const char* vsa_experiment_name(size_t index);
VSA_API const char* vsa_experiment_description(size_t index);
/* Resolves `cfg` against the experiment defaults without running anything.
 * If `resolved` is non-NULL it receives a new handle with every key filled. */
VSA_API vsa_status vsa_experiment_resolve(const char* id, const vsa_config* cfg, vsa_config** resolved);
/* Runs and writes <out_dir>/<id>.csv, .svg and .manifest.json. Nothing is
 * written when the config is invalid or the run fails. */
VSA_API vsa_status vsa_experiment_run(const char* id, const vsa_config* cfg, uint64_t seed, size_t threads,
                                      const char* out_dir);
/* Repeats a recorded run into out_dir; *identical is 1 if every output
 * matches the recorded hash. */
VSA_API vsa_status vsa_rerun(const char* manifest_path, const char* out_dir, size_t threads, int* identical);
/* Default output directory ($VSA_OUT_DIR or "vsa_out") and bundled data directory. */
VSA_API const char* vsa_default_output_dir(void);
VSA_API const char* vsa_default_data_dir(void);

/* --- knowledge base and analogies -------------------------------------- */

typedef struct vsa_knowledge vsa_knowledge;
typedef struct vsa_ranking vsa_ranking;

VSA_API vsa_status vsa_knowledge_load(const char* path, size_t n, size_t k, uint64_t seed, vsa_knowledge** out);
VSA_API void vsa_knowledge_free(vsa_knowledge* kb);
/* "probe is to `from` as ? is to `to`". */
VSA_API vsa_status vsa_knowledge_analogy(const vsa_knowledge* kb, const char* probe, const char* from, const char* to,
                                         vsa_ranking** out);
VSA_API void vsa_ranking_free(vsa_ranking* r);
VSA_API const char* vsa_ranking_role(const vsa_ranking* r);
VSA_API size_t vsa_ranking_size(const vsa_ranking* r);
VSA_API const char* vsa_ranking_name(const vsa_ranking* r, size_t i);
VSA_API double vsa_ranking_score(const vsa_ranking* r, size_t i);

VSA_API vsa_status vsa_predict_accuracy(size_t n, size_t r, size_t m, double* out);

/* --- classification ------------------------------------------------------- */

typedef enum vsa_scheme { VSA_SCHEME_BLOCK_SHIFT = 0, VSA_SCHEME_THERMOMETRIC = 1 } vsa_scheme;

typedef struct vsa_pipeline_config {
  size_t n;
  size_t k;
  int64_t kappa; /* 0 disables clipping */
  double lambda;
  vsa_scheme scheme;
  size_t folds;
  uint64_t seed;
} vsa_pipeline_config;

typedef struct vsa_dataset vsa_dataset;
typedef struct vsa_classifier vsa_classifier;

VSA_API void vsa_pipeline_config_default(vsa_pipeline_config* cfg);
VSA_API vsa_status vsa_dataset_load(const char* path, const char* label_column, vsa_dataset** out);
VSA_API void vsa_dataset_free(vsa_dataset* d);
VSA_API size_t vsa_dataset_samples(const vsa_dataset* d);
VSA_API size_t vsa_dataset_features(const vsa_dataset* d);
VSA_API size_t vsa_dataset_classes(const vsa_dataset* d);

VSA_API vsa_status vsa_cross_validate(const vsa_dataset* d, const vsa_pipeline_config* cfg, size_t threads,
                                      double* mean, double* std);
/* Exhaustive search by mean CV accuracy over shapes (shape_n[i], shape_k[i])
 * x kappas x lambdas. A NULL array selects the built-in grid for `scheme`.
 * Ties go to smaller N, then lambda, kappa and K. */
VSA_API vsa_status vsa_grid_search(const vsa_dataset* d, vsa_scheme scheme, const size_t* shape_n,
                                   const size_t* shape_k, size_t n_shapes, const int64_t* kappas, size_t n_kappas,
                                   const double* lambdas, size_t n_lambdas, size_t folds, uint64_t seed,
                                   size_t threads, vsa_pipeline_config* best, double* mean, double* std,
                                   size_t* evaluated);
VSA_API vsa_status vsa_classifier_train(const vsa_dataset* d, const vsa_pipeline_config* cfg, vsa_classifier** out);
VSA_API void vsa_classifier_free(vsa_classifier* c);
VSA_API vsa_status vsa_classifier_save(const vsa_classifier* c, const char* path);
VSA_API vsa_status vsa_classifier_load(const char* path, vsa_classifier** out);
VSA_API vsa_status vsa_classifier_config(const vsa_classifier* c, vsa_pipeline_config* out);
VSA_API vsa_status vsa_classifier_evaluate(const vsa_classifier* c, const vsa_dataset* d, double* accuracy);

/* --- block codes ---------------------------------------------------------- */

typedef struct vsa_block_code vsa_block_code;

/* Random binary K-block code of dimension N. */
VSA_API vsa_status vsa_block_code_random(size_t n, size_t k, uint64_t seed, vsa_block_code** out);
VSA_API vsa_status vsa_block_code_from_hot(size_t n, size_t k, const uint32_t* hot, vsa_block_code** out);
VSA_API void vsa_block_code_free(vsa_block_code* c);
VSA_API size_t vsa_block_code_blocks(const vsa_block_code* c);
/* Copies the K hot offsets into `hot` (capacity >= K). */
VSA_API vsa_status vsa_block_code_hot(const vsa_block_code* c, uint32_t* hot, size_t cap);
VSA_API vsa_status vsa_lcc_bind(const vsa_block_code* a, const vsa_block_code* b, vsa_block_code** out);
VSA_API vsa_status vsa_lcc_unbind(const vsa_block_code* c, const vsa_block_code* a, vsa_block_code** out);
/* Number of shared active components. */
VSA_API vsa_status vsa_block_code_overlap(const vsa_block_code* a, const vsa_block_code* b, double* out);

/* --- SPTP fan-in ------------------------------------------------------------ */

VSA_API vsa_status vsa_min_fanin(size_t n, size_t k, unsigned theta, double* exact, size_t* integer);

#ifdef __cplusplus
}
#endif

#endif
