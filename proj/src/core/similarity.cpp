#include "core/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace stepsvm {

namespace {

void assert_metric(const Matrix& v) {
    std::size_t n = v.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (v(i, i) != 0.0)
            throw validation_error("distance matrix: nonzero diagonal");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(v(i, j) - v(j, i)) > 1e-12)
                throw validation_error("distance matrix: asymmetry");
    }
    if (n < 3)
        return;
    Rng rng(0xD157);
    std::size_t checks = std::min<std::size_t>(500, n * n);
    for (std::size_t t = 0; t < checks; ++t) {
        std::size_t i = static_cast<std::size_t>(rng.next_below(n));
        std::size_t j = static_cast<std::size_t>(rng.next_below(n));
        std::size_t k = static_cast<std::size_t>(rng.next_below(n));
        if (v(i, j) > v(i, k) + v(k, j) + 1e-9)
            throw validation_error("distance matrix: triangle inequality violated");
    }
}

std::vector<std::size_t> display_order(const DistanceMatrix& dm, bool reorder) {
    std::vector<std::size_t> order(dm.values.rows());
    std::iota(order.begin(), order.end(), 0);
    if (reorder)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (dm.labels[a] != dm.labels[b])
                return dm.labels[a] < dm.labels[b];
            return dm.sample_names[a] < dm.sample_names[b];
        });
    return order;
}

} // namespace

DistanceMatrix distance_matrix(const Dataset& d, std::span<const std::size_t> subset) {
    d.validate(false);
    for (std::size_t j : subset)
        if (j >= d.p())
            throw validation_error("distance_matrix: feature index out of range");

    Matrix cols = subset.empty() ? d.features : d.features.take_cols(subset);
    std::size_t n = d.n();
    DistanceMatrix dm;
    dm.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = std::sqrt(squared_distance(cols.row(i), cols.row(j)));
            dm.values(i, j) = v;
            dm.values(j, i) = v;
        }
    dm.sample_names = d.sample_names;
    dm.labels = d.labels;
    dm.class_names = d.class_names;
    dm.feature_subset_label =
        subset.empty() ? "all" : "subset:" + std::to_string(subset.size());
    assert_metric(dm.values);
    return dm;
}

double group_contrast(const DistanceMatrix& dm) {
    return group_contrast(dm, dm.labels);
}

double group_contrast(const DistanceMatrix& dm, std::span<const int> labels) {
    std::size_t n = dm.values.rows();
    if (labels.size() != n)
        throw validation_error("group_contrast: label count mismatch");
    double within = 0.0, between = 0.0;
    std::size_t n_within = 0, n_between = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (labels[i] == labels[j]) {
                within += dm.values(i, j);
                ++n_within;
            } else {
                between += dm.values(i, j);
                ++n_between;
            }
        }
    if (n_within == 0)
        throw validation_error("group_contrast: no within-class pairs");
    if (n_between == 0)
        throw validation_error("group_contrast: no between-class pairs");
    double mean_within = within / static_cast<double>(n_within);
    if (mean_within == 0.0)
        throw validation_error("group_contrast: zero within-class distance");
    return (between / static_cast<double>(n_between)) / mean_within;
}

void write_distance_csv(const DistanceMatrix& dm, const std::string& path, bool reorder) {
    auto order = display_order(dm, reorder);
    std::string out;
    for (std::size_t i : order)
        out += "," + dm.sample_names[i];
    out += "\n";
    for (std::size_t i : order) {
        out += dm.sample_names[i];
        for (std::size_t j : order)
            out += "," + format_double(dm.values(i, j));
        out += "\n";
    }
    write_file(path, out);
}

void write_distance_pgm(const DistanceMatrix& dm, const std::string& path, bool reorder) {
    auto order = display_order(dm, reorder);
    std::size_t n = order.size();
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            hi = std::max(hi, dm.values(i, j));
    std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    for (std::size_t i : order)
        for (std::size_t j : order) {
            double v = dm.values(i, j);
            int shade = 255;
            if (hi > lo)
                shade = 255 - static_cast<int>(std::lround(255.0 * (v - lo) / (hi - lo)));
            out.push_back(static_cast<char>(static_cast<unsigned char>(shade)));
        }
    write_file(path, out);
}

} // namespace stepsvm
