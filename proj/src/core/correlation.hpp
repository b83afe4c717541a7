#pragma once

#include <span>
#include <vector>

#include "core/dataset.hpp"
#include "core/kernel.hpp"

namespace stepsvm {

// Sample Pearson correlation (n-1 convention), clamped to [-1, 1]. Throws
// undefined_correlation when either vector is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

struct RemovalRecord {
    std::size_t first = 0;   // pair (first, second), first < second
    std::size_t second = 0;
    std::size_t removed = 0; // the member with the larger mean (ties: larger index)
    double abs_r = 0.0;
};

struct CorrelationFilterResult {
    double threshold = 0.0;
    std::vector<std::size_t> kept;    // ascending
    std::vector<std::size_t> removed; // ascending
    std::vector<RemovalRecord> removal_log;
};

// Scans unordered pairs (i, j), i < j, in lexicographic order over features
// still active; |r| > threshold deactivates the higher-mean member, which
// then never participates in later comparisons. Constant columns compare as
// uncorrelated.
CorrelationFilterResult correlation_filter(const Dataset& train, double threshold);

struct CorrelationSweepEntry {
    double threshold = 0.0;
    std::size_t kept_count = 0;
    double accuracy = 0.0;
};

struct CorrelationSweepResult {
    std::vector<CorrelationSweepEntry> entries; // ascending threshold
    std::size_t best_index = 0; // max accuracy; ties: fewer kept, then smaller threshold
};

// For each threshold: filter on train, fit an SVM on the kept features, and
// score it on test. Correlations are computed once and reused.
CorrelationSweepResult sweep_correlation_thresholds(const Dataset& train, const Dataset& test,
                                                    std::span<const double> thresholds,
                                                    const KernelSpec& spec, double cost);

// Candidate-trace text in the same field-tagged shape the stepwise selection
// report uses, for side-by-side comparison of reducers.
std::string sweep_trace_text(const CorrelationSweepResult& sweep);

} // namespace stepsvm
