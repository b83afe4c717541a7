#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/fraction.hpp"
#include "core/kernel.hpp"
#include "core/svm.hpp"

namespace stepsvm {

// Resubstitution error of the SVM trained on one feature alone.
struct FeatureScore {
    std::size_t feature_index = 0;
    Fraction apr;
};

struct ThresholdCandidate {
    Fraction threshold;
    std::size_t subset_size = 0;
    double cv_accuracy = 0.0;
};

struct SelectionResult {
    std::vector<FeatureScore> scores;       // sorted ascending by (apr, index)
    Fraction chosen_threshold;
    std::vector<std::size_t> selected;      // ascending feature indices, apr <= threshold
    double validation_accuracy = 0.0;
    std::vector<ThresholdCandidate> trace;  // every candidate, ascending threshold
};

struct SelectOptions {
    KernelSpec select_kernel;  // per-feature screening; default rbf, gamma auto
    KernelSpec predict_kernel; // candidate-subset evaluation; default rbf, gamma auto
    double cost = 1.0;
    int folds = 5;
    int cv_repeats = 1;   // extra CV passes (paired across candidates) for stabler estimates
    std::uint64_t seed = 0;
    std::optional<Fraction> fixed_threshold; // skip the search, apply as given
    int threads = 1;
};

// Trains one single-feature SVM per column and returns all p scores, in
// feature order. Constant columns short-circuit to the majority-rule error
// (n - max class count)/n without touching the solver. An unset gamma
// resolves per feature to 1/variance of that column.
std::vector<FeatureScore> score_features(const Dataset& train, const KernelSpec& spec,
                                         double cost, int threads = 1);

// Sorted distinct APR values; thresholding at exactly these values
// enumerates every achievable subset of the form {i : apr_i <= t}.
std::vector<Fraction> threshold_candidates(const std::vector<FeatureScore>& scores);

// Full selection pass: score every feature, then evaluate each candidate
// threshold's subset by repeated stratified k-fold cross-validation on
// `train` and keep the threshold with the best accuracy (ties: smaller
// subset, then smaller threshold). Every candidate sees the same cv_repeats
// fold assignments, so comparisons are paired; a single CV pass quantizes
// accuracy to 1/n and on separable data ties long runs of candidates at 1.0,
// letting the tie rule rather than the evidence pick the subset. Deterministic
// for fixed (train, options).
SelectionResult select_features(const Dataset& train, const SelectOptions& options);

// Column subset preserving sample order and names; indices must be distinct.
Dataset reduce(const Dataset& d, std::span<const std::size_t> selected);

// Field-tagged text report: every score, the candidate trace, the chosen
// threshold, and the selected feature names.
void write_selection_report(const SelectionResult& result, const Dataset& train,
                            const SelectOptions& options, const std::string& dataset_label,
                            const std::string& path);

struct SelectionReportData {
    std::vector<std::size_t> selected;
    std::vector<std::string> selected_names;
    Fraction chosen_threshold;
    double validation_accuracy = 0.0;
};
SelectionReportData read_selection_report(const std::string& path);

// Stratified fold ids (0..folds-1 per sample): class members are shuffled
// with mix_seed(seed, class_id) and dealt round-robin.
std::vector<int> stratified_fold_ids(const std::vector<int>& labels, std::size_t class_count,
                                     int folds, std::uint64_t seed);

} // namespace stepsvm
