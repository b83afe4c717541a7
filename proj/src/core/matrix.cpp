#include "core/matrix.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace stepsvm {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw validation_error("ragged row list in matrix construction");
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<double> Matrix::col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        out[i] = (*this)(i, j);
    return out;
}

Matrix Matrix::take_rows(std::span<const std::size_t> idx) const {
    Matrix m(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= rows_)
            throw validation_error("row index out of range");
        for (std::size_t j = 0; j < cols_; ++j)
            m(i, j) = (*this)(idx[i], j);
    }
    return m;
}

Matrix Matrix::take_cols(std::span<const std::size_t> idx) const {
    Matrix m(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        if (idx[j] >= cols_)
            throw validation_error("column index out of range");
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            m(i, j) = (*this)(i, idx[j]);
    return m;
}

Matrix Matrix::transposed() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(j, i) = (*this)(i, j);
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

MeanSd mean_sd(std::span<const double> v) {
    MeanSd r;
    if (v.empty())
        return r;
    double sum = 0.0;
    for (double x : v)
        sum += x;
    r.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2)
        return r;
    double ss = 0.0;
    for (double x : v) {
        double d = x - r.mean;
        ss += d * d;
    }
    r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return r;
}

} // namespace stepsvm
