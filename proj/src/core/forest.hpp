#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/dataset.hpp"
#include "core/matrix.hpp"

namespace stepsvm {

struct TreeNode {
    int feature = -1;     // -1 marks a leaf
    double threshold = 0.0; // go left when value <= threshold
    int left = -1;
    int right = -1;
    int leaf_class = -1;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // node 0 is the root
};

int tree_predict_row(const DecisionTree& tree, std::span<const double> row);

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::size_t n_trees = 0;
    std::size_t mtry = 0;
    std::vector<double> importances; // per feature; sums to 1 when any split occurred
    double oob_accuracy = 0.0;       // over samples with at least one out-of-bag vote
};

// Bagged CART: each tree grows on a bootstrap of n draws with replacement,
// sampling mtry features without replacement at every node and taking the
// best Gini split until nodes are pure or smaller than 2. Tree t's stream is
// seeded with mix_seed(seed, t); trees may build concurrently with results
// stored by index.
ForestModel forest_train(const Dataset& train, std::size_t n_trees, std::size_t mtry,
                         std::uint64_t seed, int threads = 1);

// Majority vote across trees; ties go to the smallest class id.
std::vector<int> forest_predict(const ForestModel& model, const Matrix& x);

struct RfeRound {
    std::vector<std::size_t> features; // ascending
    double oob_accuracy = 0.0;
};

struct RfeResult {
    std::vector<std::size_t> best_subset;
    std::vector<RfeRound> trace; // subset sizes halve down to 1
};

// Recursive elimination: fit a forest, record its out-of-bag accuracy, drop
// the lowest-importance half (at least one feature, never below one left),
// and repeat. The best subset maximizes OOB accuracy, ties to the smaller
// subset. Round r uses mix_seed(seed, r); mtry defaults to
// floor(sqrt(#remaining)) when unset.
RfeResult rf_rfe(const Dataset& train, std::size_t n_trees, std::uint64_t seed,
                 std::optional<std::size_t> mtry = std::nullopt, int threads = 1);

// Elimination trace in the same field-tagged shape the stepwise selection
// report uses, for side-by-side comparison of reducers.
std::string rfe_trace_text(const RfeResult& result);

} // namespace stepsvm
