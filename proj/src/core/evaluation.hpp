#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/fraction.hpp"
#include "core/kernel.hpp"

namespace stepsvm {

enum class Method { stepwise, original, pca, correlation, rf_rfe };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct MethodConfig {
    Method method = Method::stepwise;
    KernelSpec select_kernel;  // stepwise screening only
    KernelSpec predict_kernel; // final SVM classifier, every method
    double cost = 1.0;
    int folds = 5;                                 // stepwise
    int cv_repeats = 1;                            // stepwise
    std::optional<Fraction> fixed_threshold;       // stepwise
    std::vector<double> corr_thresholds = {0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
    std::size_t n_trees = 500;                     // rf_rfe
    std::optional<std::size_t> mtry;               // rf_rfe; default floor(sqrt(q))
    std::optional<std::size_t> max_components;     // pca cap; default min(n_train-1, p)

    // Only options meaningful for `method` are serialized; the parser
    // rejects keys that do not apply.
    std::string serialize() const;
    static MethodConfig deserialize(const std::string& line);
};

struct MethodOutcome {
    std::vector<double> accuracies;        // per repetition; NaN marks a failure
    std::vector<std::string> failures;     // diagnostic per failed repetition
    std::vector<long long> selected_counts; // per repetition; -1 when not applicable
    double mean = 0.0;                      // over non-missing repetitions
    double sd = 0.0;                        // sample sd over non-missing
    std::size_t missing = 0;
    int rank = 0; // 1..#methods by descending mean; ties by declaration order
};

struct EvaluationReport {
    std::vector<MethodConfig> methods;
    std::vector<MethodOutcome> outcomes;
    std::size_t repetitions = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> split_seeds;   // mix_seed(master_seed, r)
    std::vector<std::uint64_t> split_digests; // over the train/test index lists
    std::string dataset_label;
    std::string dataset_path;   // manifest metadata
    std::string orientation;    // manifest metadata
    std::string label_column;   // manifest metadata
    std::uint64_t data_digest = 0;
    bool standardized = true;
};

// Fraction of exact matches.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

// Ranks 1..#outcomes by descending mean; equal means keep declaration order.
void assign_ranks(std::vector<MethodOutcome>& outcomes);

// Repetition r: stratified half split with seed mix_seed(master_seed, r);
// every method sees the identical split (paired comparison), selects on the
// training half only and is scored on the held-out half by the final SVM.
// A method failure in one repetition records a missing value and diagnostic.
EvaluationReport run_benchmark(const Dataset& d, const std::vector<MethodConfig>& methods,
                               std::size_t repetitions, std::uint64_t master_seed,
                               bool standardize_features, int threads);

std::string rank_table(const EvaluationReport& report);
std::string rank_table_csv(const EvaluationReport& report);
std::string accuracies_csv(const EvaluationReport& report);
std::string manifest_text(const EvaluationReport& report);

// Reruns the exact configuration recorded in a manifest (the dataset is
// reloaded from its recorded path and checked against the stored digest).
EvaluationReport replay_manifest(const std::string& manifest_path, int threads);

} // namespace stepsvm
