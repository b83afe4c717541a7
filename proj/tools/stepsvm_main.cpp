// stepsvm command line: select / reduce / compare / distances / synth.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 solver failure.
// All randomness flows from --seed; --threads never changes output bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <stepsvm/stepsvm.h>

namespace {

namespace fs = std::filesystem;

int exit_code(stepsvm_status status) {
    switch (status) {
    case STEPSVM_OK: return 0;
    case STEPSVM_ERROR_VALIDATION: return 1;
    case STEPSVM_ERROR_IO: return 2;
    case STEPSVM_ERROR_SOLVER: return 3;
    case STEPSVM_ERROR_INTERNAL: return 3;
    }
    return 3;
}

[[noreturn]] void fail(stepsvm_status status) {
    std::cerr << "stepsvm: error: " << stepsvm_last_error() << "\n";
    std::exit(exit_code(status));
}

void check(stepsvm_status status) {
    if (status != STEPSVM_OK)
        fail(status);
}

[[noreturn]] void fail_usage(const std::string& msg) {
    std::cerr << "stepsvm: error: " << msg << "\n";
    std::exit(1);
}

struct DatasetDeleter {
    void operator()(stepsvm_dataset* d) const { stepsvm_dataset_free(d); }
};
using DatasetPtr = std::unique_ptr<stepsvm_dataset, DatasetDeleter>;

struct DataArgs {
    std::string path;
    std::string orientation = "samples";
    std::string label_col;

    void attach(CLI::App* cmd, bool allow_unlabeled = false) {
        cmd->add_option("--data", path, "input CSV file")->required();
        cmd->add_option("--orientation", orientation, "CSV layout: samples|features")
            ->check(CLI::IsMember({"samples", "features"}))
            ->capture_default_str();
        cmd->add_option("--label-col", label_col,
                        allow_unlabeled
                            ? "label column/row name or index; 'none' for unlabeled data"
                            : "label column/row name or index (default: first)");
    }

    DatasetPtr load() const {
        stepsvm_dataset* d = nullptr;
        check(stepsvm_dataset_load_csv(path.c_str(), orientation == "features" ? 1 : 0,
                                       label_col.c_str(), &d));
        return DatasetPtr(d);
    }

    std::string default_label() const { return fs::path(path).stem().string(); }
};

void ensure_outdir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        fail_usage("cannot create output directory '" + dir + "'");
}

std::vector<size_t> selection_indices(stepsvm_selection* sel) {
    std::vector<size_t> idx(stepsvm_selection_count(sel));
    for (size_t i = 0; i < idx.size(); ++i)
        idx[i] = stepsvm_selection_feature(sel, i);
    return idx;
}

constexpr const char* kConfigHelp = "plain-text key=value file; command-line flags win";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stepwise-SVM feature selection, baseline reducers and a repeated\n"
                 "random-split benchmark for large-p-small-n classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", stepsvm_version());
    app.set_config("--config", "", kConfigHelp);

    // ---- select ----
    auto* sel_cmd = app.add_subcommand("select", "stepwise feature selection on a dataset");
    DataArgs sel_data;
    sel_data.attach(sel_cmd);
    std::string sel_kernel_select = "rbf", sel_kernel_predict = "rbf";
    double sel_cost = 1.0;
    int sel_folds = 5, sel_cv_repeats = 1, sel_threads = 1;
    std::uint64_t sel_seed = 0;
    std::string sel_threshold, sel_out = ".", sel_label;
    bool sel_no_std = false;
    sel_cmd->add_option("--kernel-select", sel_kernel_select,
                        "kernel for per-feature screening")->capture_default_str();
    sel_cmd->add_option("--kernel-predict", sel_kernel_predict,
                        "kernel for subset evaluation and the final model")->capture_default_str();
    sel_cmd->add_option("--cost", sel_cost, "soft-margin C")->capture_default_str();
    sel_cmd->add_option("--folds", sel_folds, "cross-validation folds")->capture_default_str();
    sel_cmd->add_option("--cv-repeats", sel_cv_repeats, "repeated-CV passes per candidate")
        ->capture_default_str();
    sel_cmd->add_option("--seed", sel_seed, "random seed")->capture_default_str();
    sel_cmd->add_option("--threshold", sel_threshold,
                        "fixed APR threshold ('6/181' or decimal) instead of the search");
    sel_cmd->add_flag("--no-standardize", sel_no_std, "skip feature standardization");
    sel_cmd->add_option("--threads", sel_threads, "worker threads")->capture_default_str();
    sel_cmd->add_option("--out", sel_out, "output directory")->capture_default_str();
    sel_cmd->add_option("--label", sel_label, "dataset label in the report (default: file stem)");

    // ---- reduce ----
    auto* red_cmd = app.add_subcommand("reduce", "write the column subset named by a report");
    DataArgs red_data;
    red_data.attach(red_cmd);
    std::string red_report, red_features, red_out = "reduced.csv";
    red_cmd->add_option("--report", red_report, "selection report to take the subset from");
    red_cmd->add_option("--features", red_features, "explicit comma-separated feature indices");
    red_cmd->add_option("--out", red_out, "output CSV path")->capture_default_str();

    // ---- compare ----
    auto* cmp_cmd = app.add_subcommand("compare", "benchmark reduction methods over repeated "
                                                  "stratified half splits");
    DataArgs cmp_data;
    std::string cmp_methods = "stepwise,original,pca,correlation,rf_rfe";
    std::size_t cmp_reps = 100;
    std::uint64_t cmp_seed = 0;
    int cmp_threads = 1, cmp_folds = 5, cmp_cv_repeats = 1;
    bool cmp_no_std = false;
    std::string cmp_kernel_select = "rbf", cmp_kernel_predict = "rbf";
    double cmp_cost = 1.0;
    std::string cmp_threshold, cmp_corr_thresholds, cmp_out = ".", cmp_label, cmp_replay;
    std::size_t cmp_trees = 500, cmp_mtry = 0, cmp_pca_components = 0;
    cmp_data.attach(cmp_cmd);
    // --data is required unless --replay provides everything.
    cmp_cmd->get_option("--data")->required(false);
    cmp_cmd->add_option("--methods", cmp_methods, "comma list of methods to run")
        ->capture_default_str();
    cmp_cmd->add_option("--reps", cmp_reps, "number of repetitions")->capture_default_str();
    cmp_cmd->add_option("--seed", cmp_seed, "master seed")->capture_default_str();
    cmp_cmd->add_option("--threads", cmp_threads, "worker threads")->capture_default_str();
    cmp_cmd->add_flag("--no-standardize", cmp_no_std, "skip feature standardization");
    auto* opt_ks = cmp_cmd->add_option("--kernel-select", cmp_kernel_select,
                                       "stepwise screening kernel");
    cmp_cmd->add_option("--kernel-predict", cmp_kernel_predict, "final classifier kernel")
        ->capture_default_str();
    cmp_cmd->add_option("--cost", cmp_cost, "soft-margin C")->capture_default_str();
    auto* opt_folds = cmp_cmd->add_option("--folds", cmp_folds, "stepwise CV folds");
    auto* opt_cvreps = cmp_cmd->add_option("--cv-repeats", cmp_cv_repeats,
                                           "stepwise repeated-CV passes");
    auto* opt_thr = cmp_cmd->add_option("--threshold", cmp_threshold,
                                        "stepwise fixed APR threshold");
    auto* opt_corr = cmp_cmd->add_option("--corr-thresholds", cmp_corr_thresholds,
                                         "comma list for the correlation filter sweep");
    auto* opt_trees = cmp_cmd->add_option("--trees", cmp_trees, "forest size for rf_rfe");
    auto* opt_mtry = cmp_cmd->add_option("--mtry", cmp_mtry, "features sampled per tree node");
    auto* opt_pcak = cmp_cmd->add_option("--pca-components", cmp_pca_components,
                                         "cap on swept principal components");
    cmp_cmd->add_option("--out", cmp_out, "output directory")->capture_default_str();
    cmp_cmd->add_option("--label", cmp_label, "run label in the rank table");
    cmp_cmd->add_option("--replay", cmp_replay, "rerun the configuration from a manifest file");

    // ---- distances ----
    auto* dst_cmd = app.add_subcommand("distances", "Euclidean dissimilarity matrices and "
                                                    "heatmap-ready exports");
    DataArgs dst_data;
    dst_data.attach(dst_cmd, true);
    std::string dst_subset, dst_out = ".";
    bool dst_standardize = false, dst_reorder = false;
    dst_cmd->add_option("--subset", dst_subset, "selection report restricting the columns");
    dst_cmd->add_flag("--standardize", dst_standardize,
                      "compute distances on standardized features (default: raw)");
    dst_cmd->add_flag("--reorder", dst_reorder, "group samples by class then name");
    dst_cmd->add_option("--out", dst_out, "output directory")->capture_default_str();

    // ---- synth ----
    auto* syn_cmd = app.add_subcommand("synth", "generate a planted-feature dataset");
    std::size_t syn_n = 60, syn_p = 500, syn_informative = 10, syn_k = 2;
    double syn_effect = 2.0;
    std::uint64_t syn_seed = 0;
    std::string syn_out = "synth.csv", syn_truth;
    syn_cmd->add_option("--n", syn_n, "samples")->capture_default_str();
    syn_cmd->add_option("--p", syn_p, "features")->capture_default_str();
    syn_cmd->add_option("--informative", syn_informative, "planted informative features")
        ->capture_default_str();
    syn_cmd->add_option("--k", syn_k, "classes")->capture_default_str();
    syn_cmd->add_option("--effect", syn_effect, "class mean shift per informative feature")
        ->capture_default_str();
    syn_cmd->add_option("--seed", syn_seed, "random seed")->capture_default_str();
    syn_cmd->add_option("--out", syn_out, "output CSV path")->capture_default_str();
    syn_cmd->add_option("--truth", syn_truth, "also write the informative indices here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (sel_cmd->parsed()) {
        DatasetPtr data = sel_data.load();
        DatasetPtr standardized;
        const stepsvm_dataset* train = data.get();
        if (!sel_no_std) {
            stepsvm_dataset* s = nullptr;
            check(stepsvm_dataset_standardized(data.get(), &s));
            standardized.reset(s);
            train = s;
        }

        stepsvm_select_options opts;
        stepsvm_select_options_init(&opts);
        opts.kernel_select = sel_kernel_select.c_str();
        opts.kernel_predict = sel_kernel_predict.c_str();
        opts.cost = sel_cost;
        opts.folds = sel_folds;
        opts.cv_repeats = sel_cv_repeats;
        opts.seed = sel_seed;
        if (!sel_threshold.empty())
            opts.fixed_threshold = sel_threshold.c_str();
        opts.threads = sel_threads;
        std::string label = sel_label.empty() ? sel_data.default_label() : sel_label;
        opts.dataset_label = label.c_str();

        stepsvm_selection* sel = nullptr;
        check(stepsvm_select(train, &opts, &sel));

        ensure_outdir(sel_out);
        fs::path outdir(sel_out);
        check(stepsvm_selection_write_report(sel, (outdir / "selection.txt").string().c_str()));

        auto idx = selection_indices(sel);
        stepsvm_dataset* reduced = nullptr;
        check(stepsvm_dataset_reduce(data.get(), idx.data(), idx.size(), &reduced));
        DatasetPtr reduced_ptr(reduced);
        check(stepsvm_dataset_save_csv(reduced, (outdir / "reduced.csv").string().c_str(),
                                       sel_data.orientation == "features" ? 1 : 0));

        int64_t num = 0, den = 1;
        stepsvm_selection_threshold(sel, &num, &den);
        std::cout << "selected " << idx.size() << " of " << stepsvm_dataset_features(data.get())
                  << " features at threshold " << num << "/" << den << " (validation accuracy "
                  << stepsvm_selection_validation_accuracy(sel) << ")\n";
        stepsvm_selection_free(sel);
        return 0;
    }

    if (red_cmd->parsed()) {
        if (red_report.empty() == red_features.empty())
            fail_usage("reduce needs exactly one of --report or --features");
        DatasetPtr data = red_data.load();
        std::vector<size_t> idx;
        if (!red_report.empty()) {
            stepsvm_selection* sel = nullptr;
            check(stepsvm_selection_load_report(red_report.c_str(), &sel));
            idx = selection_indices(sel);
            stepsvm_selection_free(sel);
        } else {
            for (const auto& piece : CLI::detail::split(red_features, ',')) {
                try {
                    idx.push_back(std::stoul(piece));
                } catch (const std::exception&) {
                    fail_usage("bad feature index '" + piece + "'");
                }
            }
        }
        stepsvm_dataset* reduced = nullptr;
        check(stepsvm_dataset_reduce(data.get(), idx.data(), idx.size(), &reduced));
        DatasetPtr reduced_ptr(reduced);
        check(stepsvm_dataset_save_csv(reduced, red_out.c_str(),
                                       red_data.orientation == "features" ? 1 : 0));
        std::cout << "wrote " << idx.size() << " features to " << red_out << "\n";
        return 0;
    }

    if (cmp_cmd->parsed()) {
        stepsvm_report* report = nullptr;
        if (!cmp_replay.empty()) {
            check(stepsvm_benchmark_replay(cmp_replay.c_str(), cmp_threads, &report));
        } else {
            if (cmp_data.path.empty())
                fail_usage("compare needs --data (or --replay)");

            // Reject per-method options that apply to none of the methods.
            auto has = [&](const std::string& m) {
                return ("," + cmp_methods + ",").find("," + m + ",") != std::string::npos;
            };
            if ((!opt_thr->empty() || !opt_folds->empty() || !opt_cvreps->empty() ||
                 !opt_ks->empty()) &&
                !has("stepwise"))
                fail_usage(
                    "--threshold/--folds/--cv-repeats/--kernel-select apply only to stepwise");
            if (!opt_corr->empty() && !has("correlation"))
                fail_usage("--corr-thresholds applies only to correlation");
            if ((!opt_trees->empty() || !opt_mtry->empty()) && !has("rf_rfe"))
                fail_usage("--trees/--mtry apply only to rf_rfe");
            if (!opt_pcak->empty() && !has("pca"))
                fail_usage("--pca-components applies only to pca");

            DatasetPtr data = cmp_data.load();
            stepsvm_benchmark_options opts;
            stepsvm_benchmark_options_init(&opts);
            opts.methods = cmp_methods.c_str();
            opts.repetitions = cmp_reps;
            opts.master_seed = cmp_seed;
            opts.standardize = cmp_no_std ? 0 : 1;
            opts.threads = cmp_threads;
            opts.kernel_select = cmp_kernel_select.c_str();
            opts.kernel_predict = cmp_kernel_predict.c_str();
            opts.cost = cmp_cost;
            opts.folds = cmp_folds;
            opts.cv_repeats = cmp_cv_repeats;
            if (!cmp_threshold.empty())
                opts.fixed_threshold = cmp_threshold.c_str();
            if (!cmp_corr_thresholds.empty())
                opts.corr_thresholds = cmp_corr_thresholds.c_str();
            opts.forest_trees = cmp_trees;
            opts.forest_mtry = cmp_mtry;
            opts.pca_components = cmp_pca_components;
            std::string label = cmp_label.empty() ? cmp_data.default_label() : cmp_label;
            opts.dataset_label = label.c_str();
            opts.dataset_path = cmp_data.path.c_str();
            opts.orientation = cmp_data.orientation.c_str();
            opts.label_column = cmp_data.label_col.c_str();
            check(stepsvm_benchmark_run(data.get(), &opts, &report));
        }

        ensure_outdir(cmp_out);
        check(stepsvm_report_write(report, cmp_out.c_str()));
        for (size_t m = 0; m < stepsvm_report_method_count(report); ++m)
            std::printf("%-12s mean %.4f  sd %.4f  rank %d\n", stepsvm_report_method(report, m),
                        stepsvm_report_mean(report, m), stepsvm_report_sd(report, m),
                        stepsvm_report_rank(report, m));
        stepsvm_report_free(report);
        return 0;
    }

    if (dst_cmd->parsed()) {
        DatasetPtr data = dst_data.load();
        DatasetPtr standardized;
        const stepsvm_dataset* source = data.get();
        if (dst_standardize) {
            stepsvm_dataset* s = nullptr;
            check(stepsvm_dataset_standardized(data.get(), &s));
            standardized.reset(s);
            source = s;
        }

        ensure_outdir(dst_out);
        fs::path outdir(dst_out);
        std::string contrast_lines;

        auto emit = [&](const char* tag, const size_t* subset, size_t subset_len) {
            stepsvm_distmat* dm = nullptr;
            check(stepsvm_distances(source, subset, subset_len, &dm));
            check(stepsvm_distmat_write_csv(
                dm, (outdir / (std::string("distance_") + tag + ".csv")).string().c_str(),
                dst_reorder ? 1 : 0));
            check(stepsvm_distmat_write_pgm(
                dm, (outdir / (std::string("distance_") + tag + ".pgm")).string().c_str(),
                dst_reorder ? 1 : 0));
            double contrast = 0.0;
            if (stepsvm_distmat_contrast(dm, &contrast) == STEPSVM_OK) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", contrast);
                contrast_lines += std::string(tag) + " " + buf + "\n";
            }
            stepsvm_distmat_free(dm);
        };

        emit("full", nullptr, 0);
        if (!dst_subset.empty()) {
            stepsvm_selection* sel = nullptr;
            check(stepsvm_selection_load_report(dst_subset.c_str(), &sel));
            auto idx = selection_indices(sel);
            stepsvm_selection_free(sel);
            emit("reduced", idx.data(), idx.size());
        }
        if (!contrast_lines.empty()) {
            std::FILE* f = std::fopen((outdir / "contrast.txt").string().c_str(), "wb");
            if (!f)
                fail_usage("cannot write contrast.txt");
            std::fwrite(contrast_lines.data(), 1, contrast_lines.size(), f);
            std::fclose(f);
        }
        return 0;
    }

    if (syn_cmd->parsed()) {
        stepsvm_dataset* data = nullptr;
        size_t* informative = nullptr;
        size_t informative_len = 0;
        check(stepsvm_dataset_synth(syn_n, syn_p, syn_informative, syn_k, syn_effect, syn_seed,
                                    &data, &informative, &informative_len));
        DatasetPtr data_ptr(data);
        check(stepsvm_dataset_save_csv(data, syn_out.c_str(), 0));
        if (!syn_truth.empty()) {
            std::string lines;
            for (size_t i = 0; i < informative_len; ++i)
                lines += std::to_string(informative[i]) + "\n";
            std::FILE* f = std::fopen(syn_truth.c_str(), "wb");
            if (!f) {
                stepsvm_indices_free(informative);
                fail_usage("cannot write '" + syn_truth + "'");
            }
            std::fwrite(lines.data(), 1, lines.size(), f);
            std::fclose(f);
        }
        stepsvm_indices_free(informative);
        std::cout << "wrote " << syn_n << "x" << syn_p << " dataset to " << syn_out << "\n";
        return 0;
    }

    return 1;
}
