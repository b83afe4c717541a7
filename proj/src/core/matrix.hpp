#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stepsvm {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> col(std::size_t j) const;

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix take_rows(std::span<const std::size_t> idx) const;
    Matrix take_cols(std::span<const std::size_t> idx) const;
    Matrix transposed() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Mean and sample standard deviation (denominator n-1).
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};
MeanSd mean_sd(std::span<const double> v);

} // namespace stepsvm
