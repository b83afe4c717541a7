#include "stepsvm/stepsvm.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/evaluation.hpp"
#include "core/similarity.hpp"
#include "core/stepwise.hpp"
#include "core/svm.hpp"
#include "core/textio.hpp"

using namespace stepsvm;

namespace {

thread_local std::string g_last_error;

template <typename Fn>
stepsvm_status guarded(Fn&& fn) {
    try {
        fn();
        return STEPSVM_OK;
    } catch (const parse_error& e) {
        g_last_error = e.what();
        return STEPSVM_ERROR_IO;
    } catch (const validation_error& e) {
        g_last_error = e.what();
        return STEPSVM_ERROR_VALIDATION;
    } catch (const io_error& e) {
        g_last_error = e.what();
        return STEPSVM_ERROR_IO;
    } catch (const solver_error& e) {
        g_last_error = e.what();
        return STEPSVM_ERROR_SOLVER;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return STEPSVM_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return STEPSVM_ERROR_INTERNAL;
    }
}

stepsvm_status invalid(const char* msg) {
    g_last_error = msg;
    return STEPSVM_ERROR_VALIDATION;
}

std::string or_default(const char* s, const char* fallback) {
    return s && *s ? s : fallback;
}

} // namespace

struct stepsvm_dataset {
    Dataset d;
};

struct stepsvm_model {
    SvmModel m;
};

struct stepsvm_selection {
    SelectionResult result;
    SelectOptions options;
    Dataset train_copy; // names needed by the report writer
    std::string label;
    bool full = false; // false for handles loaded from a report
};

struct stepsvm_report {
    EvaluationReport r;
};

struct stepsvm_distmat {
    DistanceMatrix dm;
};

extern "C" {

const char* stepsvm_version(void) {
    return "1.0.0";
}

const char* stepsvm_last_error(void) {
    return g_last_error.c_str();
}

/* ---- datasets ---- */

stepsvm_status stepsvm_dataset_load_csv(const char* path, int features_as_rows,
                                        const char* label_column, stepsvm_dataset** out) {
    if (!path || !out)
        return invalid("load_csv: null argument");
    return guarded([&] {
        auto* h = new stepsvm_dataset{load_csv(path,
                                               features_as_rows
                                                   ? CsvOrientation::features_as_rows
                                                   : CsvOrientation::samples_as_rows,
                                               label_column ? label_column : "")};
        *out = h;
    });
}

stepsvm_status stepsvm_dataset_save_csv(const stepsvm_dataset* d, const char* path,
                                        int features_as_rows) {
    if (!d || !path)
        return invalid("save_csv: null argument");
    return guarded([&] {
        save_csv(d->d, path,
                 features_as_rows ? CsvOrientation::features_as_rows
                                  : CsvOrientation::samples_as_rows);
    });
}

stepsvm_status stepsvm_dataset_synth(size_t n, size_t p, size_t n_informative, size_t k,
                                     double effect, uint64_t seed, stepsvm_dataset** out_data,
                                     size_t** out_informative, size_t* out_informative_len) {
    if (!out_data)
        return invalid("synth: null output");
    return guarded([&] {
        SynthResult r = synth_planted(n, p, n_informative, k, effect, seed);
        *out_data = new stepsvm_dataset{std::move(r.data)};
        if (out_informative && out_informative_len) {
            *out_informative_len = r.informative.size();
            *out_informative = new size_t[r.informative.size()];
            std::memcpy(*out_informative, r.informative.data(),
                        r.informative.size() * sizeof(size_t));
        }
    });
}

stepsvm_status stepsvm_dataset_reduce(const stepsvm_dataset* d, const size_t* features,
                                      size_t count, stepsvm_dataset** out) {
    if (!d || !features || !out)
        return invalid("reduce: null argument");
    return guarded([&] {
        *out = new stepsvm_dataset{reduce(d->d, {features, count})};
    });
}

stepsvm_status stepsvm_dataset_standardized(const stepsvm_dataset* d, stepsvm_dataset** out) {
    if (!d || !out)
        return invalid("standardized: null argument");
    return guarded([&] {
        *out = new stepsvm_dataset{standardize(d->d).first};
    });
}

size_t stepsvm_dataset_samples(const stepsvm_dataset* d) {
    return d ? d->d.n() : 0;
}

size_t stepsvm_dataset_features(const stepsvm_dataset* d) {
    return d ? d->d.p() : 0;
}

size_t stepsvm_dataset_classes(const stepsvm_dataset* d) {
    return d ? d->d.class_count() : 0;
}

const char* stepsvm_dataset_feature_name(const stepsvm_dataset* d, size_t j) {
    if (!d || j >= d->d.p())
        return nullptr;
    return d->d.feature_names[j].c_str();
}

uint64_t stepsvm_dataset_digest64(const stepsvm_dataset* d) {
    return d ? dataset_digest(d->d) : 0;
}

void stepsvm_dataset_free(stepsvm_dataset* d) {
    delete d;
}

void stepsvm_indices_free(size_t* indices) {
    delete[] indices;
}

/* ---- stepwise selection ---- */

void stepsvm_select_options_init(stepsvm_select_options* opts) {
    if (!opts)
        return;
    opts->kernel_select = nullptr;
    opts->kernel_predict = nullptr;
    opts->cost = 1.0;
    opts->folds = 5;
    opts->cv_repeats = 1;
    opts->seed = 0;
    opts->fixed_threshold = nullptr;
    opts->threads = 1;
    opts->dataset_label = nullptr;
}

namespace {

SelectOptions to_core_options(const stepsvm_select_options* opts) {
    SelectOptions o;
    if (!opts)
        return o;
    o.select_kernel = KernelSpec::parse(or_default(opts->kernel_select, "rbf"));
    o.predict_kernel = KernelSpec::parse(or_default(opts->kernel_predict, "rbf"));
    o.cost = opts->cost;
    o.folds = opts->folds;
    if (opts->cv_repeats > 0)
        o.cv_repeats = opts->cv_repeats;
    o.seed = opts->seed;
    if (opts->fixed_threshold && *opts->fixed_threshold)
        o.fixed_threshold = Fraction::parse(opts->fixed_threshold);
    o.threads = opts->threads;
    return o;
}

} // namespace

stepsvm_status stepsvm_select(const stepsvm_dataset* train, const stepsvm_select_options* opts,
                              stepsvm_selection** out) {
    if (!train || !out)
        return invalid("select: null argument");
    return guarded([&] {
        SelectOptions o = to_core_options(opts);
        auto* h = new stepsvm_selection;
        h->options = o;
        h->result = select_features(train->d, o);
        h->train_copy = train->d;
        h->label = opts ? or_default(opts->dataset_label, "dataset") : "dataset";
        h->full = true;
        *out = h;
    });
}

size_t stepsvm_selection_count(const stepsvm_selection* sel) {
    return sel ? sel->result.selected.size() : 0;
}

size_t stepsvm_selection_feature(const stepsvm_selection* sel, size_t i) {
    if (!sel || i >= sel->result.selected.size())
        return SIZE_MAX;
    return sel->result.selected[i];
}

void stepsvm_selection_threshold(const stepsvm_selection* sel, int64_t* num, int64_t* den) {
    if (!sel)
        return;
    if (num)
        *num = sel->result.chosen_threshold.num;
    if (den)
        *den = sel->result.chosen_threshold.den;
}

double stepsvm_selection_validation_accuracy(const stepsvm_selection* sel) {
    return sel ? sel->result.validation_accuracy : std::numeric_limits<double>::quiet_NaN();
}

stepsvm_status stepsvm_selection_write_report(const stepsvm_selection* sel, const char* path) {
    if (!sel || !path)
        return invalid("write_report: null argument");
    if (!sel->full)
        return invalid("write_report: selection was loaded from a report and has no scores");
    return guarded([&] {
        write_selection_report(sel->result, sel->train_copy, sel->options, sel->label, path);
    });
}

stepsvm_status stepsvm_selection_load_report(const char* path, stepsvm_selection** out) {
    if (!path || !out)
        return invalid("load_report: null argument");
    return guarded([&] {
        SelectionReportData data = read_selection_report(path);
        auto* h = new stepsvm_selection;
        h->result.selected = data.selected;
        h->result.chosen_threshold = data.chosen_threshold;
        h->result.validation_accuracy = data.validation_accuracy;
        h->full = false;
        *out = h;
    });
}

void stepsvm_selection_free(stepsvm_selection* sel) {
    delete sel;
}

/* ---- svm models ---- */

stepsvm_status stepsvm_model_train(const stepsvm_dataset* train, const char* kernel, double cost,
                                   stepsvm_model** out) {
    if (!train || !out)
        return invalid("model_train: null argument");
    return guarded([&] {
        KernelSpec spec = KernelSpec::parse(or_default(kernel, "rbf"));
        *out = new stepsvm_model{train_multiclass(train->d, spec, cost)};
    });
}

stepsvm_status stepsvm_model_predict(const stepsvm_model* m, const double* x, size_t rows,
                                     size_t cols, int* out_labels) {
    if (!m || !x || !out_labels)
        return invalid("model_predict: null argument");
    return guarded([&] {
        Matrix mx(rows, cols);
        std::memcpy(mx.data().data(), x, rows * cols * sizeof(double));
        auto pred = predict_multiclass(m->m, mx);
        for (size_t i = 0; i < pred.size(); ++i)
            out_labels[i] = pred[i];
    });
}

stepsvm_status stepsvm_model_save(const stepsvm_model* m, const char* path) {
    if (!m || !path)
        return invalid("model_save: null argument");
    return guarded([&] { save_model(m->m, path); });
}

stepsvm_status stepsvm_model_load(const char* path, stepsvm_model** out) {
    if (!path || !out)
        return invalid("model_load: null argument");
    return guarded([&] { *out = new stepsvm_model{load_model(path)}; });
}

void stepsvm_model_free(stepsvm_model* m) {
    delete m;
}

/* ---- benchmark ---- */

void stepsvm_benchmark_options_init(stepsvm_benchmark_options* opts) {
    if (!opts)
        return;
    std::memset(opts, 0, sizeof(*opts));
    opts->repetitions = 100;
    opts->standardize = 1;
    opts->threads = 1;
    opts->cost = 1.0;
    opts->folds = 5;
    opts->forest_trees = 500;
}

namespace {

std::vector<MethodConfig> build_method_configs(const stepsvm_benchmark_options* opts) {
    std::string list = or_default(opts->methods, "stepwise,original,pca,correlation,rf_rfe");
    KernelSpec select_kernel = KernelSpec::parse(or_default(opts->kernel_select, "rbf"));
    KernelSpec predict_kernel = KernelSpec::parse(or_default(opts->kernel_predict, "rbf"));

    std::vector<double> corr_thresholds;
    if (opts->corr_thresholds && *opts->corr_thresholds) {
        for (const auto& piece : split(opts->corr_thresholds, ',')) {
            auto v = parse_double(piece);
            if (!v)
                throw validation_error("bad correlation threshold '" + piece + "'");
            corr_thresholds.push_back(*v);
        }
    }

    std::vector<MethodConfig> configs;
    for (const auto& name : split(list, ',')) {
        auto m = parse_method(name);
        if (!m)
            throw validation_error("unknown method '" + name + "'");
        MethodConfig cfg;
        cfg.method = *m;
        cfg.select_kernel = select_kernel;
        cfg.predict_kernel = predict_kernel;
        cfg.cost = opts->cost;
        cfg.folds = opts->folds;
        if (opts->cv_repeats > 0)
            cfg.cv_repeats = opts->cv_repeats;
        if (opts->fixed_threshold && *opts->fixed_threshold)
            cfg.fixed_threshold = Fraction::parse(opts->fixed_threshold);
        if (!corr_thresholds.empty())
            cfg.corr_thresholds = corr_thresholds;
        cfg.n_trees = opts->forest_trees;
        if (opts->forest_mtry > 0)
            cfg.mtry = opts->forest_mtry;
        if (opts->pca_components > 0)
            cfg.max_components = opts->pca_components;
        configs.push_back(std::move(cfg));
    }
    return configs;
}

} // namespace

stepsvm_status stepsvm_benchmark_run(const stepsvm_dataset* d,
                                     const stepsvm_benchmark_options* opts,
                                     stepsvm_report** out) {
    if (!d || !opts || !out)
        return invalid("benchmark_run: null argument");
    return guarded([&] {
        auto configs = build_method_configs(opts);
        EvaluationReport r = run_benchmark(d->d, configs, opts->repetitions, opts->master_seed,
                                           opts->standardize != 0,
                                           opts->threads > 0 ? opts->threads : 1);
        r.dataset_label = or_default(opts->dataset_label, "dataset");
        r.dataset_path = or_default(opts->dataset_path, "");
        r.orientation = or_default(opts->orientation, "samples");
        r.label_column = or_default(opts->label_column, "");
        *out = new stepsvm_report{std::move(r)};
    });
}

stepsvm_status stepsvm_benchmark_replay(const char* manifest_path, int threads,
                                        stepsvm_report** out) {
    if (!manifest_path || !out)
        return invalid("benchmark_replay: null argument");
    return guarded([&] {
        *out = new stepsvm_report{replay_manifest(manifest_path, threads > 0 ? threads : 1)};
    });
}

size_t stepsvm_report_method_count(const stepsvm_report* r) {
    return r ? r->r.methods.size() : 0;
}

const char* stepsvm_report_method(const stepsvm_report* r, size_t m) {
    static thread_local std::string name;
    if (!r || m >= r->r.methods.size())
        return nullptr;
    name = method_name(r->r.methods[m].method);
    return name.c_str();
}

size_t stepsvm_report_repetitions(const stepsvm_report* r) {
    return r ? r->r.repetitions : 0;
}

double stepsvm_report_mean(const stepsvm_report* r, size_t m) {
    if (!r || m >= r->r.outcomes.size())
        return std::numeric_limits<double>::quiet_NaN();
    return r->r.outcomes[m].mean;
}

double stepsvm_report_sd(const stepsvm_report* r, size_t m) {
    if (!r || m >= r->r.outcomes.size())
        return std::numeric_limits<double>::quiet_NaN();
    return r->r.outcomes[m].sd;
}

int stepsvm_report_rank(const stepsvm_report* r, size_t m) {
    if (!r || m >= r->r.outcomes.size())
        return 0;
    return r->r.outcomes[m].rank;
}

double stepsvm_report_accuracy(const stepsvm_report* r, size_t m, size_t rep) {
    if (!r || m >= r->r.outcomes.size() || rep >= r->r.repetitions)
        return std::numeric_limits<double>::quiet_NaN();
    return r->r.outcomes[m].accuracies[rep];
}

stepsvm_status stepsvm_report_write(const stepsvm_report* r, const char* dir) {
    if (!r || !dir)
        return invalid("report_write: null argument");
    return guarded([&] {
        std::filesystem::path base(dir);
        if (!std::filesystem::is_directory(base))
            throw io_error("'" + std::string(dir) + "' is not a directory");
        write_file((base / "table.txt").string(), rank_table(r->r));
        write_file((base / "table.csv").string(), rank_table_csv(r->r));
        write_file((base / "accuracies.csv").string(), accuracies_csv(r->r));
        write_file((base / "manifest.txt").string(), manifest_text(r->r));
    });
}

void stepsvm_report_free(stepsvm_report* r) {
    delete r;
}

/* ---- distances ---- */

stepsvm_status stepsvm_distances(const stepsvm_dataset* d, const size_t* subset,
                                 size_t subset_len, stepsvm_distmat** out) {
    if (!d || !out || (subset_len > 0 && !subset))
        return invalid("distances: null argument");
    return guarded([&] {
        *out = new stepsvm_distmat{distance_matrix(d->d, {subset, subset_len})};
    });
}

size_t stepsvm_distmat_size(const stepsvm_distmat* dm) {
    return dm ? dm->dm.values.rows() : 0;
}

double stepsvm_distmat_value(const stepsvm_distmat* dm, size_t i, size_t j) {
    if (!dm || i >= dm->dm.values.rows() || j >= dm->dm.values.rows())
        return std::numeric_limits<double>::quiet_NaN();
    return dm->dm.values(i, j);
}

stepsvm_status stepsvm_distmat_contrast(const stepsvm_distmat* dm, double* out) {
    if (!dm || !out)
        return invalid("contrast: null argument");
    return guarded([&] { *out = group_contrast(dm->dm); });
}

stepsvm_status stepsvm_distmat_write_csv(const stepsvm_distmat* dm, const char* path,
                                         int reorder) {
    if (!dm || !path)
        return invalid("distmat_write_csv: null argument");
    return guarded([&] { write_distance_csv(dm->dm, path, reorder != 0); });
}

stepsvm_status stepsvm_distmat_write_pgm(const stepsvm_distmat* dm, const char* path,
                                         int reorder) {
    if (!dm || !path)
        return invalid("distmat_write_pgm: null argument");
    return guarded([&] { write_distance_pgm(dm->dm, path, reorder != 0); });
}

void stepsvm_distmat_free(stepsvm_distmat* dm) {
    delete dm;
}

} // extern "C"
