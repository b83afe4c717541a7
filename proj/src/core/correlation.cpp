#include "core/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "core/errors.hpp"
#include "core/svm.hpp"
#include "core/textio.hpp"

namespace stepsvm {

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw validation_error("pearson_r: vector lengths differ");
    if (x.size() < 2)
        throw validation_error("pearson_r: need at least 2 points");
    auto mx = mean_sd(x);
    auto my = mean_sd(y);
    if (mx.sd == 0.0 || my.sd == 0.0)
        throw undefined_correlation("pearson_r: constant vector");
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        cov += (x[i] - mx.mean) * (y[i] - my.mean);
    cov /= static_cast<double>(x.size() - 1);
    return std::clamp(cov / (mx.sd * my.sd), -1.0, 1.0);
}

namespace {

// Shared scan; abs_r(i, j) must return 0 for undefined pairs.
CorrelationFilterResult filter_scan(std::size_t p, const std::vector<double>& means,
                                    const std::function<double(std::size_t, std::size_t)>& abs_r,
                                    double threshold) {
    CorrelationFilterResult result;
    result.threshold = threshold;
    std::vector<bool> active(p, true);
    for (std::size_t i = 0; i < p; ++i) {
        if (!active[i])
            continue;
        for (std::size_t j = i + 1; j < p && active[i]; ++j) {
            if (!active[j])
                continue;
            double r = abs_r(i, j);
            if (r > threshold) {
                std::size_t victim;
                if (means[i] > means[j])
                    victim = i;
                else if (means[j] > means[i])
                    victim = j;
                else
                    victim = j; // equal means: the larger index goes
                active[victim] = false;
                result.removal_log.push_back({i, j, victim, r});
            }
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        (active[i] ? result.kept : result.removed).push_back(i);
    return result;
}

std::vector<double> column_means(const Dataset& d) {
    std::vector<double> means(d.p());
    for (std::size_t j = 0; j < d.p(); ++j)
        means[j] = mean_sd(d.features.col(j)).mean;
    return means;
}

} // namespace

CorrelationFilterResult correlation_filter(const Dataset& train, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw validation_error("correlation_filter: threshold must be in (0,1)");
    train.validate(false);
    auto means = column_means(train);
    std::vector<std::vector<double>> cols(train.p());
    for (std::size_t j = 0; j < train.p(); ++j)
        cols[j] = train.features.col(j);
    auto abs_r = [&](std::size_t i, std::size_t j) {
        try {
            return std::abs(pearson_r(cols[i], cols[j]));
        } catch (const undefined_correlation&) {
            return 0.0;
        }
    };
    return filter_scan(train.p(), means, abs_r, threshold);
}

CorrelationSweepResult sweep_correlation_thresholds(const Dataset& train, const Dataset& test,
                                                    std::span<const double> thresholds,
                                                    const KernelSpec& spec, double cost) {
    if (thresholds.empty())
        throw validation_error("sweep_correlation_thresholds: no thresholds");
    std::vector<double> ts(thresholds.begin(), thresholds.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts)
        if (t <= 0.0 || t >= 1.0)
            throw validation_error("correlation threshold must be in (0,1)");

    // Normalize columns once: r_ij = z_i . z_j / (n-1).
    std::size_t n = train.n(), p = train.p();
    auto means = column_means(train);
    Matrix z(n, p);
    std::vector<bool> constant(p, false);
    for (std::size_t j = 0; j < p; ++j) {
        auto col = train.features.col(j);
        auto ms = mean_sd(col);
        constant[j] = ms.sd == 0.0;
        double inv = constant[j] ? 0.0 : 1.0 / ms.sd;
        for (std::size_t i = 0; i < n; ++i)
            z(i, j) = (col[i] - ms.mean) * inv;
    }
    Matrix zt = z.transposed();
    auto abs_r = [&](std::size_t i, std::size_t j) {
        if (constant[i] || constant[j])
            return 0.0;
        double r = dot(zt.row(i), zt.row(j)) / static_cast<double>(n - 1);
        return std::min(std::abs(r), 1.0);
    };

    CorrelationSweepResult result;
    for (double t : ts) {
        auto filtered = filter_scan(p, means, abs_r, t);
        Dataset fit = train.subset_cols(filtered.kept);
        SvmModel model = train_multiclass(fit, spec, cost);
        auto pred = predict_multiclass(model, test.features.take_cols(filtered.kept));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] == test.labels[i])
                ++correct;
        result.entries.push_back(
            {t, filtered.kept.size(), static_cast<double>(correct) / static_cast<double>(test.n())});
    }

    // Ascending thresholds keep nondecreasing feature counts, so the first
    // strict maximum also realizes the smaller-subset/smaller-threshold ties.
    result.best_index = 0;
    for (std::size_t i = 1; i < result.entries.size(); ++i)
        if (result.entries[i].accuracy > result.entries[result.best_index].accuracy)
            result.best_index = i;
    return result;
}

std::string sweep_trace_text(const CorrelationSweepResult& sweep) {
    std::ostringstream out;
    out << "stepsvm-trace v1\n";
    out << "method correlation\n";
    out << "candidates " << sweep.entries.size() << "\n";
    for (const auto& e : sweep.entries)
        out << "candidate " << format_double(e.threshold) << " " << e.kept_count << " "
            << format_double(e.accuracy) << "\n";
    const auto& best = sweep.entries[sweep.best_index];
    out << "chosen_threshold " << format_double(best.threshold) << "\n";
    return out.str();
}

} // namespace stepsvm
