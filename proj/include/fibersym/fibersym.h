#ifndef FIBERSYM_H
#define FIBERSYM_H

#include <stddef.h>
#include <stdint.h>

#if defined(FSYM_BUILDING)
#define FSYM_API __attribute__((visibility("default")))
#else
#define FSYM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; they double as CLI exit codes. */
typedef enum fsym_status {
  FSYM_OK = 0,
  FSYM_ERR_DOMAIN = 2,
  FSYM_ERR_VALIDATION = 3,
  FSYM_ERR_NUMERIC = 4,
  FSYM_ERR_IO = 5
} fsym_status;

typedef enum fsym_mode { FSYM_TENSION = 0, FSYM_COMPRESSION = 1, FSYM_SHEAR = 2 } fsym_mode;
typedef enum fsym_direction { FSYM_IN_PLANE = 0, FSYM_CROSS_PLANE = 1 } fsym_direction;

#define FSYM_TERM_COUNT 12

typedef struct fsym_model fsym_model;
typedef struct fsym_dataset fsym_dataset;
typedef struct fsym_fit fsym_fit;

typedef struct fsym_fit_config {
  double alpha;
  int epochs;
  double learning_rate;
  double threshold; /* kPa */
  uint64_t seed;
  double init_scale;
  int restarts;
  int refine; /* nonzero: BIC simplification of the L1 support */
} fsym_fit_config;

typedef struct fsym_welch_result {
  double t;
  double df;
  double p;
} fsym_welch_result;

/* Message and class of the last failure on the calling thread. */
FSYM_API const char* fsym_last_error_message(void);
FSYM_API const char* fsym_last_error_class(void);
FSYM_API const char* fsym_version(void);

/* Strings returned through char** are owned by the caller. */
FSYM_API void fsym_string_free(char* s);

/* Models */
FSYM_API fsym_status fsym_model_builtin(const char* name, fsym_model** out);
/* Built-in name or path to a model JSON file. */
FSYM_API fsym_status fsym_model_resolve(const char* name_or_path, fsym_model** out);
FSYM_API fsym_status fsym_model_create(const char* name, const double outer[FSYM_TERM_COUNT],
                                       const double inner[FSYM_TERM_COUNT], fsym_model** out);
FSYM_API fsym_status fsym_model_load(const char* path, fsym_model** out);
FSYM_API fsym_status fsym_model_save(const fsym_model* model, const char* path);
FSYM_API fsym_status fsym_model_to_json(const fsym_model* model, char** out);
FSYM_API fsym_status fsym_model_weights(const fsym_model* model, double outer[FSYM_TERM_COUNT],
                                        double inner[FSYM_TERM_COUNT]);
FSYM_API fsym_status fsym_model_name(const fsym_model* model, char** out);
FSYM_API void fsym_model_free(fsym_model* model);

/* Kinematics and mechanics. `loading` is lambda for uniaxial modes, gamma for shear. */
FSYM_API fsym_status fsym_parse_case(const char* text, fsym_mode* mode, fsym_direction* dir);
FSYM_API fsym_status fsym_protocol_limit(fsym_mode mode, double* out);
FSYM_API fsym_status fsym_invariants(fsym_mode mode, fsym_direction dir, double loading, double out[4]);
FSYM_API fsym_status fsym_energy(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading,
                                 double* out);
FSYM_API fsym_status fsym_stress(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading,
                                 double* out);
/* CSV loading,stress_kPa,mode,direction,term_1..term_12 on a uniform grid of n_points. */
FSYM_API fsym_status fsym_predict_csv(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading,
                                      int n_points, char** out);

/* Datasets */
FSYM_API fsym_status fsym_dataset_synthesize(const fsym_model* model, int n_points, double noise, uint64_t seed,
                                             int replicates, fsym_dataset** out);
FSYM_API fsym_status fsym_dataset_load(const char* path, int permissive, fsym_dataset** out);
FSYM_API fsym_status fsym_dataset_save(const fsym_dataset* set, const char* path);
FSYM_API fsym_status fsym_dataset_to_csv(const fsym_dataset* set, char** out);
FSYM_API fsym_status fsym_dataset_fingerprint(const fsym_dataset* set, char** out);
FSYM_API fsym_status fsym_dataset_material(const fsym_dataset* set, char** out);
FSYM_API fsym_status fsym_dataset_sample_count(const fsym_dataset* set, size_t* out);
FSYM_API void fsym_dataset_free(fsym_dataset* set);

/* Discovery */
FSYM_API void fsym_fit_config_default(fsym_fit_config* config);
FSYM_API fsym_status fsym_fit_train(const fsym_dataset* set, const fsym_fit_config* config, fsym_fit** out);
FSYM_API fsym_status fsym_fit_model(const fsym_fit* fit, fsym_model** out);
/* Writes up to FSYM_TERM_COUNT 1-based indices. */
FSYM_API fsym_status fsym_fit_active_terms(const fsym_fit* fit, int terms[FSYM_TERM_COUNT], int* count);
FSYM_API fsym_status fsym_fit_mean_r2(const fsym_fit* fit, double* out);
FSYM_API fsym_status fsym_fit_report_json(const fsym_fit* fit, char** out);
FSYM_API void fsym_fit_free(fsym_fit* fit);

FSYM_API fsym_status fsym_evaluation_report_json(const fsym_model* model, const fsym_dataset* set, char** out);
/* threads <= 0 uses the hardware concurrency. */
FSYM_API fsym_status fsym_subsets_report_json(const fsym_dataset* set, int max_terms, int threads, char** out);

/* Analysis */
/* CSV direction,sample,E_ten_kPa,E_com_kPa,E_shr_kPa,E_mean_kPa, one row per sample. */
FSYM_API fsym_status fsym_stiffness_table_csv(const fsym_dataset* set, char** out);
/* Welch comparison per attribute; needs at least two samples per direction. */
FSYM_API fsym_status fsym_anisotropy_report_csv(const fsym_dataset* set, char** out);
FSYM_API fsym_status fsym_welch(const double* a, size_t na, const double* b, size_t nb, fsym_welch_result* out);

/* Report bundle; `model` may be NULL. `files` receives newline-separated names. */
FSYM_API fsym_status fsym_export_reports(const fsym_dataset* set, const fsym_model* model, const char* out_dir,
                                         int svg, char** files);

FSYM_API fsym_status fsym_fnv1a_hex(const char* bytes, size_t length, char** out);

#ifdef __cplusplus
}
#endif

#endif
