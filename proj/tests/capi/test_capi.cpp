// Exercises the shared-library surface only: everything goes through
// stepsvm/stepsvm.h, no core headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <stepsvm/stepsvm.h>

namespace {

namespace fs = std::filesystem;

std::string tmp(const std::string& name) {
    return (fs::temp_directory_path() / ("stepsvm_capi_" + name)).string();
}

stepsvm_dataset* make_planted(size_t n, size_t p, size_t informative, double effect,
                              uint64_t seed, std::vector<size_t>* truth = nullptr) {
    stepsvm_dataset* d = nullptr;
    size_t* idx = nullptr;
    size_t len = 0;
    REQUIRE(stepsvm_dataset_synth(n, p, informative, 2, effect, seed, &d, &idx, &len) ==
            STEPSVM_OK);
    if (truth)
        truth->assign(idx, idx + len);
    stepsvm_indices_free(idx);
    return d;
}

} // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::string(stepsvm_version()) == "1.0.0");

    stepsvm_dataset* d = nullptr;
    stepsvm_status status = stepsvm_dataset_load_csv("/no/such/file.csv", 0, "", &d);
    CHECK(status == STEPSVM_ERROR_IO);
    CHECK(std::strlen(stepsvm_last_error()) > 0);
}

TEST_CASE("synthetic datasets expose accessors and digests") {
    std::vector<size_t> truth;
    stepsvm_dataset* d = make_planted(20, 10, 3, 2.0, 7, &truth);
    CHECK(stepsvm_dataset_samples(d) == 20);
    CHECK(stepsvm_dataset_features(d) == 10);
    CHECK(stepsvm_dataset_classes(d) == 2);
    CHECK(truth.size() == 3);
    CHECK(std::string(stepsvm_dataset_feature_name(d, 0)) == "f0");
    CHECK(stepsvm_dataset_feature_name(d, 10) == nullptr);

    stepsvm_dataset* d2 = make_planted(20, 10, 3, 2.0, 7);
    CHECK(stepsvm_dataset_digest64(d) == stepsvm_dataset_digest64(d2));
    stepsvm_dataset* d3 = make_planted(20, 10, 3, 2.0, 8);
    CHECK(stepsvm_dataset_digest64(d) != stepsvm_dataset_digest64(d3));

    stepsvm_dataset_free(d);
    stepsvm_dataset_free(d2);
    stepsvm_dataset_free(d3);
}

TEST_CASE("csv save and load round-trip the digest") {
    stepsvm_dataset* d = make_planted(12, 6, 2, 1.5, 3);
    auto path = tmp("roundtrip.csv");
    REQUIRE(stepsvm_dataset_save_csv(d, path.c_str(), 1) == STEPSVM_OK);

    stepsvm_dataset* back = nullptr;
    REQUIRE(stepsvm_dataset_load_csv(path.c_str(), 1, "", &back) == STEPSVM_OK);
    CHECK(stepsvm_dataset_digest64(back) == stepsvm_dataset_digest64(d));

    stepsvm_dataset_free(back);
    stepsvm_dataset_free(d);
    std::remove(path.c_str());
}

TEST_CASE("reduce validates indices through the boundary") {
    stepsvm_dataset* d = make_planted(10, 4, 1, 1.0, 5);
    size_t dup[] = {1, 1};
    stepsvm_dataset* out = nullptr;
    CHECK(stepsvm_dataset_reduce(d, dup, 2, &out) == STEPSVM_ERROR_VALIDATION);
    size_t good[] = {1, 3};
    REQUIRE(stepsvm_dataset_reduce(d, good, 2, &out) == STEPSVM_OK);
    CHECK(stepsvm_dataset_features(out) == 2);
    CHECK(std::string(stepsvm_dataset_feature_name(out, 0)) == "f1");
    stepsvm_dataset_free(out);
    stepsvm_dataset_free(d);
}

TEST_CASE("selection finds planted features and reports round-trip") {
    std::vector<size_t> truth;
    stepsvm_dataset* raw = make_planted(40, 30, 5, 2.5, 11, &truth);
    stepsvm_dataset* d = nullptr;
    REQUIRE(stepsvm_dataset_standardized(raw, &d) == STEPSVM_OK);

    stepsvm_select_options opts;
    stepsvm_select_options_init(&opts);
    CHECK(opts.folds == 5);
    CHECK(opts.cost == 1.0);
    opts.seed = 9;
    opts.threads = 2;
    opts.dataset_label = "capi";

    stepsvm_selection* sel = nullptr;
    REQUIRE(stepsvm_select(d, &opts, &sel) == STEPSVM_OK);
    CHECK(stepsvm_selection_count(sel) >= 1);
    CHECK(stepsvm_selection_validation_accuracy(sel) > 0.7);
    int64_t num = -1, den = -1;
    stepsvm_selection_threshold(sel, &num, &den);
    CHECK(den > 0);
    CHECK(num >= 0);

    auto report_path = tmp("selection.txt");
    REQUIRE(stepsvm_selection_write_report(sel, report_path.c_str()) == STEPSVM_OK);

    stepsvm_selection* loaded = nullptr;
    REQUIRE(stepsvm_selection_load_report(report_path.c_str(), &loaded) == STEPSVM_OK);
    REQUIRE(stepsvm_selection_count(loaded) == stepsvm_selection_count(sel));
    for (size_t i = 0; i < stepsvm_selection_count(sel); ++i)
        CHECK(stepsvm_selection_feature(loaded, i) == stepsvm_selection_feature(sel, i));
    // A loaded handle has no scores to re-serialize.
    CHECK(stepsvm_selection_write_report(loaded, report_path.c_str()) ==
          STEPSVM_ERROR_VALIDATION);

    stepsvm_selection_free(loaded);
    stepsvm_selection_free(sel);
    stepsvm_dataset_free(d);
    stepsvm_dataset_free(raw);
    std::remove(report_path.c_str());
}

TEST_CASE("fixed thresholds pass through the options struct") {
    stepsvm_dataset* d = make_planted(20, 8, 3, 2.0, 17);
    stepsvm_select_options opts;
    stepsvm_select_options_init(&opts);
    opts.fixed_threshold = "1/4";
    stepsvm_selection* sel = nullptr;
    REQUIRE(stepsvm_select(d, &opts, &sel) == STEPSVM_OK);
    int64_t num = 0, den = 0;
    stepsvm_selection_threshold(sel, &num, &den);
    CHECK(num == 1);
    CHECK(den == 4);
    stepsvm_selection_free(sel);
    stepsvm_dataset_free(d);
}

TEST_CASE("models train, persist and predict identically") {
    stepsvm_dataset* d = make_planted(24, 6, 3, 2.0, 29);
    stepsvm_model* model = nullptr;
    REQUIRE(stepsvm_model_train(d, "rbf:gamma=0.5", 1.0, &model) == STEPSVM_OK);

    std::vector<double> probe(5 * 6);
    for (size_t i = 0; i < probe.size(); ++i)
        probe[i] = static_cast<double>(i % 7) - 3.0;
    std::vector<int> labels_a(5), labels_b(5);
    REQUIRE(stepsvm_model_predict(model, probe.data(), 5, 6, labels_a.data()) == STEPSVM_OK);

    auto path = tmp("model.txt");
    REQUIRE(stepsvm_model_save(model, path.c_str()) == STEPSVM_OK);
    stepsvm_model* loaded = nullptr;
    REQUIRE(stepsvm_model_load(path.c_str(), &loaded) == STEPSVM_OK);
    REQUIRE(stepsvm_model_predict(loaded, probe.data(), 5, 6, labels_b.data()) == STEPSVM_OK);
    CHECK(labels_a == labels_b);

    // Width mismatch is a validation error.
    CHECK(stepsvm_model_predict(model, probe.data(), 6, 5, labels_a.data()) ==
          STEPSVM_ERROR_VALIDATION);

    stepsvm_model_free(model);
    stepsvm_model_free(loaded);
    stepsvm_dataset_free(d);
    std::remove(path.c_str());
}

TEST_CASE("benchmark runs, writes and replays") {
    stepsvm_dataset* d = make_planted(24, 12, 4, 2.0, 37);
    auto data_path = tmp("bench.csv");
    REQUIRE(stepsvm_dataset_save_csv(d, data_path.c_str(), 0) == STEPSVM_OK);
    stepsvm_dataset_free(d);
    stepsvm_dataset* loaded = nullptr;
    REQUIRE(stepsvm_dataset_load_csv(data_path.c_str(), 0, "", &loaded) == STEPSVM_OK);

    stepsvm_benchmark_options opts;
    stepsvm_benchmark_options_init(&opts);
    CHECK(opts.repetitions == 100); // paper-shaped default
    CHECK(opts.forest_trees == 500);
    opts.methods = "stepwise,original";
    opts.repetitions = 3;
    opts.master_seed = 42;
    opts.threads = 2;
    opts.folds = 3;
    opts.dataset_label = "bench";
    opts.dataset_path = data_path.c_str();

    stepsvm_report* report = nullptr;
    REQUIRE(stepsvm_benchmark_run(loaded, &opts, &report) == STEPSVM_OK);
    REQUIRE(stepsvm_report_method_count(report) == 2);
    CHECK(std::string(stepsvm_report_method(report, 0)) == "stepwise");
    CHECK(stepsvm_report_repetitions(report) == 3);
    CHECK(stepsvm_report_mean(report, 0) >= 0.0);
    CHECK(stepsvm_report_mean(report, 0) <= 1.0);
    CHECK(stepsvm_report_rank(report, 0) >= 1);
    CHECK(!std::isnan(stepsvm_report_accuracy(report, 0, 2)));
    CHECK(std::isnan(stepsvm_report_accuracy(report, 0, 3))); // out of range

    auto outdir = tmp("benchdir");
    fs::create_directories(outdir);
    REQUIRE(stepsvm_report_write(report, outdir.c_str()) == STEPSVM_OK);
    CHECK(fs::exists(fs::path(outdir) / "table.txt"));
    CHECK(fs::exists(fs::path(outdir) / "table.csv"));
    CHECK(fs::exists(fs::path(outdir) / "accuracies.csv"));
    CHECK(fs::exists(fs::path(outdir) / "manifest.txt"));

    stepsvm_report* replayed = nullptr;
    REQUIRE(stepsvm_benchmark_replay((fs::path(outdir) / "manifest.txt").string().c_str(), 1,
                                     &replayed) == STEPSVM_OK);
    for (size_t m = 0; m < 2; ++m) {
        CHECK(stepsvm_report_mean(replayed, m) == stepsvm_report_mean(report, m));
        for (size_t r = 0; r < 3; ++r)
            CHECK(stepsvm_report_accuracy(replayed, m, r) ==
                  stepsvm_report_accuracy(report, m, r));
    }

    stepsvm_report_free(replayed);
    stepsvm_report_free(report);
    stepsvm_dataset_free(loaded);
    fs::remove_all(outdir);
    std::remove(data_path.c_str());
}

TEST_CASE("unknown methods are rejected at the boundary") {
    stepsvm_dataset* d = make_planted(16, 5, 2, 1.0, 2);
    stepsvm_benchmark_options opts;
    stepsvm_benchmark_options_init(&opts);
    opts.methods = "stepwise,magic";
    stepsvm_report* report = nullptr;
    CHECK(stepsvm_benchmark_run(d, &opts, &report) == STEPSVM_ERROR_VALIDATION);
    CHECK(std::string(stepsvm_last_error()).find("magic") != std::string::npos);
    stepsvm_dataset_free(d);
}

TEST_CASE("distances and contrast flow through the boundary") {
    stepsvm_dataset* d = make_planted(16, 8, 4, 3.0, 19);
    stepsvm_distmat* dm = nullptr;
    REQUIRE(stepsvm_distances(d, nullptr, 0, &dm) == STEPSVM_OK);
    CHECK(stepsvm_distmat_size(dm) == 16);
    CHECK(stepsvm_distmat_value(dm, 3, 3) == 0.0);
    CHECK(stepsvm_distmat_value(dm, 0, 1) == stepsvm_distmat_value(dm, 1, 0));

    double contrast = 0.0;
    REQUIRE(stepsvm_distmat_contrast(dm, &contrast) == STEPSVM_OK);
    CHECK(contrast > 0.0);

    auto csv_path = tmp("dm.csv");
    auto pgm_path = tmp("dm.pgm");
    REQUIRE(stepsvm_distmat_write_csv(dm, csv_path.c_str(), 1) == STEPSVM_OK);
    REQUIRE(stepsvm_distmat_write_pgm(dm, pgm_path.c_str(), 0) == STEPSVM_OK);
    CHECK(fs::file_size(csv_path) > 0);
    CHECK(fs::file_size(pgm_path) > 0);

    size_t subset[] = {0, 1};
    stepsvm_distmat* dm2 = nullptr;
    REQUIRE(stepsvm_distances(d, subset, 2, &dm2) == STEPSVM_OK);
    CHECK(stepsvm_distmat_value(dm2, 0, 1) <= stepsvm_distmat_value(dm, 0, 1));

    stepsvm_distmat_free(dm2);
    stepsvm_distmat_free(dm);
    stepsvm_dataset_free(d);
    std::remove(csv_path.c_str());
    std::remove(pgm_path.c_str());
}
