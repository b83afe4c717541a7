#include "core/pca.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/svm.hpp"
#include "core/sym_eig.hpp"

namespace stepsvm {

namespace {

void apply_sign_convention(Matrix& components) {
    for (std::size_t r = 0; r < components.rows(); ++r) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < components.cols(); ++j) {
            double a = std::abs(components(r, j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (components(r, arg) < 0.0)
            for (std::size_t j = 0; j < components.cols(); ++j)
                components(r, j) = -components(r, j);
    }
}

// Deterministic orthonormal completion: Gram-Schmidt of canonical basis
// vectors against the rows already present.
void pad_components(Matrix& components, std::size_t filled) {
    std::size_t p = components.cols();
    std::size_t want = components.rows();
    for (std::size_t e = 0; e < p && filled < want; ++e) {
        std::vector<double> v(p, 0.0);
        v[e] = 1.0;
        for (std::size_t r = 0; r < filled; ++r) {
            double proj = 0.0;
            for (std::size_t j = 0; j < p; ++j)
                proj += components(r, j) * v[j];
            for (std::size_t j = 0; j < p; ++j)
                v[j] -= proj * components(r, j);
        }
        double norm = 0.0;
        for (double x : v)
            norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 0.5)
            continue; // e was nearly in the span; try the next axis
        for (std::size_t j = 0; j < p; ++j)
            components(filled, j) = v[j] / norm;
        ++filled;
    }
    if (filled < want)
        throw validation_error("pca_fit: could not complete an orthonormal basis");
}

} // namespace

PcaBasis pca_fit(const Dataset& train, std::size_t max_components) {
    train.validate(false);
    std::size_t n = train.n(), p = train.p();
    std::size_t rank_cap = std::min(n - 1, p);
    if (max_components < 1 || max_components > rank_cap)
        throw validation_error("pca_fit: max_components must be in [1, min(n-1, p)]");

    PcaBasis basis;
    basis.center.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        basis.center[j] = mean_sd(train.features.col(j)).mean;

    Matrix xc = train.features;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            xc(i, j) -= basis.center[j];

    basis.components = Matrix(max_components, p);
    basis.explained_variance.assign(max_components, 0.0);
    std::size_t filled = 0;

    if (n <= p) {
        // Gram route: eigenvectors u of Xc Xc' give loadings Xc'u / sqrt(ev).
        Matrix gram(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double g = dot(xc.row(i), xc.row(j));
                gram(i, j) = g;
                gram(j, i) = g;
            }
        std::vector<double> ev;
        Matrix u;
        sym_eigen(gram, ev, u);
        double floor = ev.empty() ? 0.0 : std::max(ev[0], 0.0) * 1e-12;
        for (std::size_t r = 0; r < max_components; ++r) {
            if (ev[r] <= floor)
                break;
            basis.explained_variance[r] = ev[r] / static_cast<double>(n - 1);
            double inv = 1.0 / std::sqrt(ev[r]);
            for (std::size_t j = 0; j < p; ++j) {
                double w = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    w += xc(i, j) * u(r, i);
                basis.components(r, j) = w * inv;
            }
            ++filled;
        }
    } else {
        Matrix cov(p, p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    s += xc(i, a) * xc(i, b);
                s /= static_cast<double>(n - 1);
                cov(a, b) = s;
                cov(b, a) = s;
            }
        std::vector<double> ev;
        Matrix u;
        sym_eigen(cov, ev, u);
        double floor = ev.empty() ? 0.0 : std::max(ev[0], 0.0) * 1e-12;
        for (std::size_t r = 0; r < max_components; ++r) {
            if (ev[r] <= floor)
                break;
            basis.explained_variance[r] = ev[r];
            for (std::size_t j = 0; j < p; ++j)
                basis.components(r, j) = u(r, j);
            ++filled;
        }
    }

    pad_components(basis.components, filled);
    apply_sign_convention(basis.components);
    return basis;
}

Matrix pca_project(const PcaBasis& basis, const Matrix& x) {
    if (x.cols() != basis.components.cols())
        throw validation_error("pca_project: width mismatch");
    std::size_t q = basis.components.rows();
    Matrix scores(x.rows(), q);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t r = 0; r < q; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j)
                s += (x(i, j) - basis.center[j]) * basis.components(r, j);
            scores(i, r) = s;
        }
    return scores;
}

PcaSearchResult pca_svm_search(const Dataset& train, const Dataset& test, const PcaBasis& basis,
                               const KernelSpec& spec, double cost) {
    Matrix train_scores = pca_project(basis, train.features);
    Matrix test_scores = pca_project(basis, test.features);
    std::size_t q = basis.components.rows();

    Dataset fit;
    fit.labels = train.labels;
    fit.sample_names = train.sample_names;
    fit.class_names = train.class_names;

    PcaSearchResult result;
    for (std::size_t k = 1; k <= q; ++k) {
        std::vector<std::size_t> prefix(k);
        for (std::size_t j = 0; j < k; ++j)
            prefix[j] = j;
        fit.features = train_scores.take_cols(prefix);
        fit.feature_names.clear();
        for (std::size_t j = 0; j < k; ++j)
            fit.feature_names.push_back("pc" + std::to_string(j + 1));

        SvmModel model = train_multiclass(fit, spec, cost);
        auto pred = predict_multiclass(model, test_scores.take_cols(prefix));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] == test.labels[i])
                ++correct;
        result.accuracy.push_back(static_cast<double>(correct) /
                                  static_cast<double>(test.n()));
    }

    result.best_k = 1;
    for (std::size_t k = 2; k <= q; ++k)
        if (result.accuracy[k - 1] > result.accuracy[result.best_k - 1])
            result.best_k = k;
    return result;
}

} // namespace stepsvm
