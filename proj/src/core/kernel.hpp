#pragma once

#include <optional>
#include <span>
#include <string>

#include "core/matrix.hpp"

namespace stepsvm {

enum class KernelFamily { linear, polynomial, rbf, sigmoid };

std::string family_name(KernelFamily f);

// Kernel selector plus hyperparameters. gamma left unset means "resolve from
// training data": 1 / (q * pooled feature variance), which reduces to
// 1 / variance for single-feature models.
struct KernelSpec {
    KernelFamily family = KernelFamily::rbf;
    std::optional<double> gamma;
    int degree = 3;
    double coef = 0.0;

    // "family[:gamma=..][:degree=..][:coef=..]"
    static KernelSpec parse(const std::string& text);
    std::string str() const;

    bool needs_gamma() const { return family != KernelFamily::linear; }
    double gamma_or(double fallback) const { return gamma ? *gamma : fallback; }

    void validate() const;
};

// Default gamma rule for a training matrix: 1 / (cols * mean per-column
// sample variance). Falls back to 1 when the data is entirely constant.
double default_gamma(const Matrix& train);

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z);

// Entry (i,j) = K(A_i, B_j). A and B must share their column count.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& A, const Matrix& B);

} // namespace stepsvm
