#include "core/kernel.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/textio.hpp"

namespace stepsvm {

std::string family_name(KernelFamily f) {
    switch (f) {
    case KernelFamily::linear: return "linear";
    case KernelFamily::polynomial: return "polynomial";
    case KernelFamily::rbf: return "rbf";
    case KernelFamily::sigmoid: return "sigmoid";
    }
    return "?";
}

KernelSpec KernelSpec::parse(const std::string& text) {
    auto parts = split(text, ':');
    KernelSpec spec;
    const std::string& fam = parts[0];
    if (fam == "linear") spec.family = KernelFamily::linear;
    else if (fam == "polynomial" || fam == "poly") spec.family = KernelFamily::polynomial;
    else if (fam == "rbf") spec.family = KernelFamily::rbf;
    else if (fam == "sigmoid") spec.family = KernelFamily::sigmoid;
    else throw validation_error("unknown kernel family '" + fam + "'");

    for (std::size_t i = 1; i < parts.size(); ++i) {
        auto eq = parts[i].find('=');
        if (eq == std::string::npos)
            throw validation_error("bad kernel option '" + parts[i] + "' (want key=value)");
        std::string key = parts[i].substr(0, eq);
        std::string val = parts[i].substr(eq + 1);
        auto num = parse_double(val);
        if (!num)
            throw validation_error("bad kernel option value '" + val + "'");
        if (key == "gamma") {
            spec.gamma = *num;
        } else if (key == "degree") {
            if (*num != std::floor(*num))
                throw validation_error("kernel degree must be an integer");
            spec.degree = static_cast<int>(*num);
        } else if (key == "coef") {
            spec.coef = *num;
        } else {
            throw validation_error("unknown kernel option '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

std::string KernelSpec::str() const {
    std::string s = family_name(family);
    if (gamma)
        s += ":gamma=" + format_double(*gamma);
    if (family == KernelFamily::polynomial)
        s += ":degree=" + std::to_string(degree);
    if (family == KernelFamily::polynomial || family == KernelFamily::sigmoid)
        s += ":coef=" + format_double(coef);
    return s;
}

void KernelSpec::validate() const {
    if (gamma && needs_gamma() && *gamma <= 0.0)
        throw validation_error("kernel gamma must be > 0");
    if (family == KernelFamily::polynomial && degree < 1)
        throw validation_error("polynomial degree must be >= 1");
}

double default_gamma(const Matrix& train) {
    if (train.cols() == 0)
        return 1.0;
    double total = 0.0;
    for (std::size_t j = 0; j < train.cols(); ++j) {
        auto ms = mean_sd(train.col(j));
        total += ms.sd * ms.sd;
    }
    double pooled = total / static_cast<double>(train.cols());
    if (pooled <= 0.0)
        return 1.0;
    return 1.0 / (static_cast<double>(train.cols()) * pooled);
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size())
        throw validation_error("kernel_eval: vector lengths differ");
    if (x.empty())
        throw validation_error("kernel_eval: empty vectors");
    switch (spec.family) {
    case KernelFamily::linear:
        return dot(x, z);
    case KernelFamily::polynomial: {
        double base = spec.gamma_or(1.0) * dot(x, z) + spec.coef;
        return std::pow(base, spec.degree);
    }
    case KernelFamily::rbf:
        return std::exp(-spec.gamma_or(1.0) * squared_distance(x, z));
    case KernelFamily::sigmoid:
        return std::tanh(spec.gamma_or(1.0) * dot(x, z) + spec.coef);
    }
    throw validation_error("unreachable kernel family");
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols())
        throw validation_error("kernel_matrix: column counts differ");
    Matrix K(A.rows(), B.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < B.rows(); ++j)
            K(i, j) = kernel_eval(spec, A.row(i), B.row(j));
    return K;
}

} // namespace stepsvm
