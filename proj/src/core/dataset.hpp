#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/matrix.hpp"

namespace stepsvm {

// Labeled sample matrix, always stored samples-as-rows. Class labels are
// dense ids 0..k-1 in first-appearance order; class_names keeps the original
// label text per id.
struct Dataset {
    Matrix features;                        // n x p
    std::vector<int> labels;                // length n, values 0..k-1
    std::vector<std::string> feature_names; // length p, unique
    std::vector<std::string> sample_names;  // length n, unique
    std::vector<std::string> class_names;   // length k, unique

    std::size_t n() const { return features.rows(); }
    std::size_t p() const { return features.cols(); }
    std::size_t class_count() const { return class_names.size(); }

    std::vector<std::size_t> class_counts() const;

    Dataset subset_rows(std::span<const std::size_t> idx) const;
    Dataset subset_cols(std::span<const std::size_t> idx) const;

    // Throws validation_error on any broken invariant. Datasets loaded
    // without a label column (distance-only use) carry a single class and
    // pass require_multiclass = false.
    void validate(bool require_multiclass = true) const;
};

enum class CsvOrientation { samples_as_rows, features_as_rows };

// label_column: a column/row name, a 0-based index (samples_as_rows), or
// empty for the default (first column / first row after the header). The
// literal "none" loads an unlabeled matrix as a single-class dataset.
Dataset load_csv(const std::string& path, CsvOrientation orientation,
                 const std::string& label_column = "");

void save_csv(const Dataset& d, const std::string& path, CsvOrientation orientation);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

// Per class c: ceil(count(c)/2) samples go to train, the rest to test.
SplitIndices stratified_half_split(const Dataset& d, std::uint64_t seed);

struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> sd; // sample sd, denominator n-1; 0 marks a constant column
};

// Centers and scales every feature to mean 0 / sd 1 on d itself; constant
// columns become all-zero.
std::pair<Dataset, FeatureStats> standardize(const Dataset& d);

// Applies previously computed statistics (train stats on test data).
Dataset standardize_with(const Dataset& d, const FeatureStats& stats);

struct SynthResult {
    Dataset data;
    std::vector<std::size_t> informative; // ascending ground-truth indices
};

// Gaussian noise matrix with n_informative planted columns whose class-c mean
// is effect*c. Labels are assigned round-robin (sample i gets class i mod k).
SynthResult synth_planted(std::size_t n, std::size_t p, std::size_t n_informative,
                          std::size_t k, double effect, std::uint64_t seed);

std::uint64_t dataset_digest(const Dataset& d);

} // namespace stepsvm
