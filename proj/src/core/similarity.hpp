#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/matrix.hpp"

namespace stepsvm {

struct DistanceMatrix {
    Matrix values; // n x n, symmetric, zero diagonal
    std::vector<std::string> sample_names;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::string feature_subset_label;
};

// Pairwise Euclidean distances over the chosen columns (all columns when
// subset is empty). Symmetry, zero diagonal and the triangle inequality on
// sampled triples are asserted on construction.
DistanceMatrix distance_matrix(const Dataset& d, std::span<const std::size_t> subset = {});

// (mean between-class distance) / (mean within-class distance); > 1 means
// class structure. Throws when no within-class pair exists.
double group_contrast(const DistanceMatrix& dm);
double group_contrast(const DistanceMatrix& dm, std::span<const int> labels);

// CSV with a name header row and column; reorder groups samples by class
// then name to expose block structure.
void write_distance_csv(const DistanceMatrix& dm, const std::string& path, bool reorder);

// 8-bit binary portable graymap: min distance maps to white, max to black.
void write_distance_pgm(const DistanceMatrix& dm, const std::string& path, bool reorder);

} // namespace stepsvm
