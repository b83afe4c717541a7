#pragma once

#include <vector>

#include "core/dataset.hpp"
#include "core/kernel.hpp"
#include "core/matrix.hpp"

namespace stepsvm {

struct PcaBasis {
    Matrix components;                      // q x p, orthonormal rows
    std::vector<double> explained_variance; // nonincreasing, >= 0
    std::vector<double> center;             // length p, training column means
};

// Top principal components of the mean-centered training data. When n <= p
// the decomposition runs on the n x n Gram matrix and loadings are
// reconstructed, otherwise on the p x p covariance matrix. Rank-deficient
// requests are padded with an orthonormal completion carrying zero variance.
// Sign convention: each component's largest-magnitude loading is positive.
PcaBasis pca_fit(const Dataset& train, std::size_t max_components);

// Scores: (X - center) projected on the component rows.
Matrix pca_project(const PcaBasis& basis, const Matrix& x);

struct PcaSearchResult {
    std::size_t best_k = 0;            // 1-based component count
    std::vector<double> accuracy;      // accuracy[k-1] for the PC1..PCk model
};

// Fits an SVM on the first k score columns for k = 1..q and scores each on
// the test set; best k by maximum accuracy, ties to the smaller k.
PcaSearchResult pca_svm_search(const Dataset& train, const Dataset& test, const PcaBasis& basis,
                               const KernelSpec& spec, double cost);

} // namespace stepsvm
