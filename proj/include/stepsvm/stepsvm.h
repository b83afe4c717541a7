/*
 * stepsvm: stepwise-SVM feature selection for large-p-small-n
 * classification, with correlation / PCA / RF-RFE baselines and a repeated
 * random-split benchmark harness.
 *
 * C interface over the C++ core: opaque handles, integer status codes, and a
 * per-thread error message retrievable with stepsvm_last_error(). Every
 * object returned through an out-parameter must be released with the
 * matching *_free function. All entry points are thread-safe as long as each
 * handle is used from one thread at a time.
 */
#ifndef STEPSVM_H
#define STEPSVM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define STEPSVM_API __declspec(dllexport)
#else
#define STEPSVM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stepsvm_status {
    STEPSVM_OK = 0,
    STEPSVM_ERROR_VALIDATION = 1, /* bad arguments or broken invariants */
    STEPSVM_ERROR_IO = 2,         /* missing/unreadable/unwritable files */
    STEPSVM_ERROR_SOLVER = 3,     /* optimizer failed to converge */
    STEPSVM_ERROR_INTERNAL = 4
} stepsvm_status;

typedef struct stepsvm_dataset stepsvm_dataset;
typedef struct stepsvm_model stepsvm_model;
typedef struct stepsvm_selection stepsvm_selection;
typedef struct stepsvm_report stepsvm_report;
typedef struct stepsvm_distmat stepsvm_distmat;

STEPSVM_API const char* stepsvm_version(void);

/* Message for the most recent failing call on this thread. */
STEPSVM_API const char* stepsvm_last_error(void);

/* ---------------------------------------------------------------- datasets
 *
 * CSV layouts:
 *   samples-as-rows: optional header line; one sample per row with the label
 *     in the column named/indexed by label_column (default: first column).
 *   features-as-rows (microarray convention): header "name,<sample names>",
 *     a label row (default: the first row after the header, or the row whose
 *     name equals label_column), then one feature per row.
 * label_column = "none" loads an unlabeled matrix as a single-class dataset
 * usable only for distance exports.
 */
STEPSVM_API stepsvm_status stepsvm_dataset_load_csv(const char* path, int features_as_rows,
                                                    const char* label_column,
                                                    stepsvm_dataset** out);
STEPSVM_API stepsvm_status stepsvm_dataset_save_csv(const stepsvm_dataset* d, const char* path,
                                                    int features_as_rows);

/* Synthetic large-p-small-n generator: standard normal noise with
 * n_informative planted columns whose class-c mean is effect*c. Ground-truth
 * indices are returned through out_informative (free with
 * stepsvm_indices_free). */
STEPSVM_API stepsvm_status stepsvm_dataset_synth(size_t n, size_t p, size_t n_informative,
                                                 size_t k, double effect, uint64_t seed,
                                                 stepsvm_dataset** out_data,
                                                 size_t** out_informative,
                                                 size_t* out_informative_len);

/* Column subset preserving sample order; indices must be distinct. */
STEPSVM_API stepsvm_status stepsvm_dataset_reduce(const stepsvm_dataset* d,
                                                  const size_t* features, size_t count,
                                                  stepsvm_dataset** out);

/* Mean-0 / sd-1 per feature, statistics fitted on d itself. */
STEPSVM_API stepsvm_status stepsvm_dataset_standardized(const stepsvm_dataset* d,
                                                        stepsvm_dataset** out);

STEPSVM_API size_t stepsvm_dataset_samples(const stepsvm_dataset* d);
STEPSVM_API size_t stepsvm_dataset_features(const stepsvm_dataset* d);
STEPSVM_API size_t stepsvm_dataset_classes(const stepsvm_dataset* d);
STEPSVM_API const char* stepsvm_dataset_feature_name(const stepsvm_dataset* d, size_t j);
STEPSVM_API uint64_t stepsvm_dataset_digest64(const stepsvm_dataset* d);
STEPSVM_API void stepsvm_dataset_free(stepsvm_dataset* d);
STEPSVM_API void stepsvm_indices_free(size_t* indices);

/* ------------------------------------------------------ stepwise selection
 *
 * Kernel strings: "family[:gamma=..][:degree=..][:coef=..]" with family one
 * of linear|polynomial|rbf|sigmoid. An omitted gamma resolves from data:
 * 1/(q * pooled feature variance), i.e. 1/variance for one feature.
 */
typedef struct stepsvm_select_options {
    const char* kernel_select;   /* per-feature screening; NULL = "rbf" */
    const char* kernel_predict;  /* subset evaluation/final model; NULL = "rbf" */
    double cost;                 /* soft-margin C, default 1.0 */
    int folds;                   /* stratified CV folds, default 5 */
    int cv_repeats;              /* repeated-CV passes, default 1 */
    uint64_t seed;
    const char* fixed_threshold; /* "6/181" or decimal; NULL = search */
    int threads;
    const char* dataset_label;   /* report metadata; NULL = "dataset" */
} stepsvm_select_options;

STEPSVM_API void stepsvm_select_options_init(stepsvm_select_options* opts);

/* Scores every feature by single-feature SVM training error, then picks the
 * error threshold whose feature subset maximizes cross-validated accuracy
 * (ties: smaller subset, then smaller threshold). */
STEPSVM_API stepsvm_status stepsvm_select(const stepsvm_dataset* train,
                                          const stepsvm_select_options* opts,
                                          stepsvm_selection** out);

STEPSVM_API size_t stepsvm_selection_count(const stepsvm_selection* sel);
STEPSVM_API size_t stepsvm_selection_feature(const stepsvm_selection* sel, size_t i);
STEPSVM_API void stepsvm_selection_threshold(const stepsvm_selection* sel, int64_t* num,
                                             int64_t* den);
STEPSVM_API double stepsvm_selection_validation_accuracy(const stepsvm_selection* sel);

/* Field-tagged text report: all per-feature scores, the candidate trace and
 * the selected feature names. Reports can be loaded back to reuse the
 * selected subset (scores/trace are not restored). */
STEPSVM_API stepsvm_status stepsvm_selection_write_report(const stepsvm_selection* sel,
                                                          const char* path);
STEPSVM_API stepsvm_status stepsvm_selection_load_report(const char* path,
                                                         stepsvm_selection** out);
STEPSVM_API void stepsvm_selection_free(stepsvm_selection* sel);

/* -------------------------------------------------------------- svm models
 *
 * One-against-one multiclass SVM trained by dual decomposition. Models
 * serialize to a versioned text format at full double precision.
 */
STEPSVM_API stepsvm_status stepsvm_model_train(const stepsvm_dataset* train, const char* kernel,
                                               double cost, stepsvm_model** out);

/* x is row-major rows*cols; out_labels receives dense class ids. */
STEPSVM_API stepsvm_status stepsvm_model_predict(const stepsvm_model* m, const double* x,
                                                 size_t rows, size_t cols, int* out_labels);
STEPSVM_API stepsvm_status stepsvm_model_save(const stepsvm_model* m, const char* path);
STEPSVM_API stepsvm_status stepsvm_model_load(const char* path, stepsvm_model** out);
STEPSVM_API void stepsvm_model_free(stepsvm_model* m);

/* --------------------------------------------------------------- benchmark
 *
 * Repeated stratified half-splits; every configured method sees the same
 * split per repetition, selects features on the training half only, and is
 * scored on the held-out half by the final SVM.
 */
typedef struct stepsvm_benchmark_options {
    const char* methods;     /* comma list of stepwise,original,pca,correlation,rf_rfe;
                                NULL = all five */
    size_t repetitions;      /* default 100 */
    uint64_t master_seed;
    int standardize;         /* default 1: per-split train statistics */
    int threads;
    const char* kernel_select;
    const char* kernel_predict;
    double cost;
    int folds;
    int cv_repeats;               /* 0 = default 1 */
    const char* fixed_threshold;  /* stepwise: skip the threshold search */
    size_t forest_trees;          /* default 500 */
    size_t forest_mtry;           /* 0 = floor(sqrt(#features)) */
    size_t pca_components;        /* 0 = min(n_train-1, p) */
    const char* corr_thresholds;  /* comma list; NULL = 0.7,...,0.95 */
    const char* dataset_label;    /* row label in the rank table */
    const char* dataset_path;     /* recorded in the manifest for replay */
    const char* orientation;      /* "samples" or "features" */
    const char* label_column;
} stepsvm_benchmark_options;

STEPSVM_API void stepsvm_benchmark_options_init(stepsvm_benchmark_options* opts);

STEPSVM_API stepsvm_status stepsvm_benchmark_run(const stepsvm_dataset* d,
                                                 const stepsvm_benchmark_options* opts,
                                                 stepsvm_report** out);

/* Reruns the configuration stored in a manifest written by
 * stepsvm_report_write; the dataset is reloaded from its recorded path and
 * verified against the recorded digest. */
STEPSVM_API stepsvm_status stepsvm_benchmark_replay(const char* manifest_path, int threads,
                                                    stepsvm_report** out);

STEPSVM_API size_t stepsvm_report_method_count(const stepsvm_report* r);
STEPSVM_API const char* stepsvm_report_method(const stepsvm_report* r, size_t m);
STEPSVM_API size_t stepsvm_report_repetitions(const stepsvm_report* r);
STEPSVM_API double stepsvm_report_mean(const stepsvm_report* r, size_t m);
STEPSVM_API double stepsvm_report_sd(const stepsvm_report* r, size_t m);
STEPSVM_API int stepsvm_report_rank(const stepsvm_report* r, size_t m);
/* NaN marks a repetition where the method failed. */
STEPSVM_API double stepsvm_report_accuracy(const stepsvm_report* r, size_t m, size_t rep);

/* Writes table.txt, table.csv, accuracies.csv and manifest.txt into dir
 * (which must exist). Output bytes depend only on the report contents. */
STEPSVM_API stepsvm_status stepsvm_report_write(const stepsvm_report* r, const char* dir);
STEPSVM_API void stepsvm_report_free(stepsvm_report* r);

/* --------------------------------------------------------------- distances
 *
 * Pairwise Euclidean dissimilarity over all features, or over a column
 * subset (subset_len = 0 means all).
 */
STEPSVM_API stepsvm_status stepsvm_distances(const stepsvm_dataset* d, const size_t* subset,
                                             size_t subset_len, stepsvm_distmat** out);
STEPSVM_API size_t stepsvm_distmat_size(const stepsvm_distmat* dm);
STEPSVM_API double stepsvm_distmat_value(const stepsvm_distmat* dm, size_t i, size_t j);

/* Mean between-class over mean within-class distance; fails on single-class
 * data. */
STEPSVM_API stepsvm_status stepsvm_distmat_contrast(const stepsvm_distmat* dm, double* out);

/* reorder != 0 groups samples by class then name, exposing block structure.
 * The PGM maps the minimum distance to white and the maximum to black. */
STEPSVM_API stepsvm_status stepsvm_distmat_write_csv(const stepsvm_distmat* dm, const char* path,
                                                     int reorder);
STEPSVM_API stepsvm_status stepsvm_distmat_write_pgm(const stepsvm_distmat* dm, const char* path,
                                                     int reorder);
STEPSVM_API void stepsvm_distmat_free(stepsvm_distmat* dm);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STEPSVM_H */
