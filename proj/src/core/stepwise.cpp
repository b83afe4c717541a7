#include "core/stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace stepsvm {

namespace {

bool column_is_constant(const Matrix& m, std::size_t j) {
    for (std::size_t i = 1; i < m.rows(); ++i)
        if (m(i, j) != m(0, j))
            return false;
    return true;
}

} // namespace

std::vector<FeatureScore> score_features(const Dataset& train, const KernelSpec& spec,
                                         double cost, int threads) {
    train.validate();
    auto counts = train.class_counts();
    std::size_t majority = *std::max_element(counts.begin(), counts.end());
    auto n = static_cast<std::int64_t>(train.n());

    std::vector<FeatureScore> scores(train.p());
    parallel_for(train.p(), threads, [&](std::size_t j) {
        scores[j].feature_index = j;
        if (column_is_constant(train.features, j)) {
            scores[j].apr = Fraction::of(n - static_cast<std::int64_t>(majority), n);
            return;
        }
        std::size_t cols[1] = {j};
        Dataset single = train.subset_cols(cols);
        try {
            SvmModel model = train_multiclass(single, spec, cost);
            scores[j].apr = apparent_error_rate(model, single);
        } catch (const solver_error& e) {
            throw solver_error("feature " + std::to_string(j) + " ('" +
                               train.feature_names[j] + "'): " + e.what());
        }
    });
    return scores;
}

std::vector<Fraction> threshold_candidates(const std::vector<FeatureScore>& scores) {
    if (scores.empty())
        throw validation_error("threshold_candidates: no scores");
    std::vector<Fraction> values;
    for (const auto& s : scores)
        values.push_back(s.apr);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::vector<int> stratified_fold_ids(const std::vector<int>& labels, std::size_t class_count,
                                     int folds, std::uint64_t seed) {
    std::vector<int> fold_of(labels.size(), 0);
    for (std::size_t c = 0; c < class_count; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == static_cast<int>(c))
                members.push_back(i);
        Rng rng(mix_seed(seed, c));
        rng.shuffle(members);
        for (std::size_t t = 0; t < members.size(); ++t)
            fold_of[members[t]] = static_cast<int>(t % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

namespace {

// Pooled repeated-cross-validation accuracy of a multiclass SVM restricted
// to the given feature subset: within each repeat every sample is predicted
// exactly once by the model trained on the other folds.
double cv_subset_accuracy(const Dataset& train, std::span<const std::size_t> subset,
                          const std::vector<std::vector<int>>& repeat_folds, int folds,
                          const KernelSpec& predict_spec, double cost) {
    Dataset restricted = train.subset_cols(subset);
    std::size_t correct = 0;
    for (const auto& fold_of : repeat_folds) {
        for (int f = 0; f < folds; ++f) {
            std::vector<std::size_t> fit_rows, eval_rows;
            for (std::size_t i = 0; i < restricted.n(); ++i)
                (fold_of[i] == f ? eval_rows : fit_rows).push_back(i);
            if (eval_rows.empty())
                continue;
            Dataset fit = restricted.subset_rows(fit_rows);
            SvmModel model = train_multiclass(fit, predict_spec, cost);
            auto pred = predict_multiclass(model, restricted.features.take_rows(eval_rows));
            for (std::size_t t = 0; t < eval_rows.size(); ++t)
                if (pred[t] == restricted.labels[eval_rows[t]])
                    ++correct;
        }
    }
    return static_cast<double>(correct) /
           static_cast<double>(restricted.n() * repeat_folds.size());
}

} // namespace

SelectionResult select_features(const Dataset& train, const SelectOptions& options) {
    train.validate();
    if (options.folds < 2)
        throw validation_error("select_features: folds must be >= 2");
    for (std::size_t count : train.class_counts())
        if (count < static_cast<std::size_t>(options.folds))
            throw validation_error("select_features: every class needs at least `folds` samples");

    if (options.cv_repeats < 1)
        throw validation_error("select_features: cv_repeats must be >= 1");

    SelectionResult result;
    result.scores = score_features(train, options.select_kernel, options.cost, options.threads);

    std::vector<Fraction> candidates;
    if (options.fixed_threshold)
        candidates.push_back(*options.fixed_threshold);
    else
        candidates = threshold_candidates(result.scores);

    auto subset_for = [&](const Fraction& t) {
        std::vector<std::size_t> subset;
        for (const auto& s : result.scores)
            if (s.apr <= t)
                subset.push_back(s.feature_index);
        std::sort(subset.begin(), subset.end());
        return subset;
    };

    std::vector<std::vector<int>> repeat_folds;
    for (int r = 0; r < options.cv_repeats; ++r)
        repeat_folds.push_back(stratified_fold_ids(train.labels, train.class_count(),
                                                   options.folds,
                                                   mix_seed(options.seed, r)));

    result.trace.resize(candidates.size());
    parallel_for(candidates.size(), options.threads <= 1 ? 1 : options.threads,
                 [&](std::size_t ci) {
                     auto subset = subset_for(candidates[ci]);
                     if (subset.empty())
                         throw validation_error("threshold " + candidates[ci].str() +
                                                " selects no features");
                     result.trace[ci] = {candidates[ci], subset.size(),
                                         cv_subset_accuracy(train, subset, repeat_folds,
                                                            options.folds,
                                                            options.predict_kernel,
                                                            options.cost)};
                 });

    // Candidates ascend in threshold and therefore in subset size, so the
    // first strict maximum realizes the tie rules (smaller subset, then
    // smaller threshold).
    std::size_t best = 0;
    for (std::size_t ci = 1; ci < result.trace.size(); ++ci)
        if (result.trace[ci].cv_accuracy > result.trace[best].cv_accuracy)
            best = ci;

    result.chosen_threshold = result.trace[best].threshold;
    result.validation_accuracy = result.trace[best].cv_accuracy;
    result.selected = subset_for(result.chosen_threshold);

    std::sort(result.scores.begin(), result.scores.end(),
              [](const FeatureScore& a, const FeatureScore& b) {
                  int c = a.apr.compare(b.apr);
                  if (c != 0)
                      return c < 0;
                  return a.feature_index < b.feature_index;
              });
    return result;
}

Dataset reduce(const Dataset& d, std::span<const std::size_t> selected) {
    if (selected.empty())
        throw validation_error("reduce: empty feature selection");
    std::set<std::size_t> unique(selected.begin(), selected.end());
    if (unique.size() != selected.size())
        throw validation_error("reduce: duplicate feature indices");
    for (std::size_t j : selected)
        if (j >= d.p())
            throw validation_error("reduce: feature index " + std::to_string(j) +
                                   " out of range");
    return d.subset_cols(selected);
}

void write_selection_report(const SelectionResult& result, const Dataset& train,
                            const SelectOptions& options, const std::string& dataset_label,
                            const std::string& path) {
    std::ostringstream out;
    out << "stepsvm-selection v1\n";
    out << "dataset " << dataset_label << "\n";
    out << "n_train " << train.n() << "\n";
    out << "p " << train.p() << "\n";
    out << "kernel_select " << options.select_kernel.str() << "\n";
    out << "kernel_predict " << options.predict_kernel.str() << "\n";
    out << "cost " << format_double(options.cost) << "\n";
    out << "folds " << options.folds << "\n";
    out << "cv_repeats " << options.cv_repeats << "\n";
    out << "seed " << options.seed << "\n";
    out << "mode " << (options.fixed_threshold ? "fixed" : "search") << "\n";
    out << "scores " << result.scores.size() << "\n";
    for (const auto& s : result.scores)
        out << "score " << s.feature_index << " " << s.apr.str() << " "
            << train.feature_names[s.feature_index] << "\n";
    out << "candidates " << result.trace.size() << "\n";
    for (const auto& c : result.trace)
        out << "candidate " << c.threshold.str() << " " << c.subset_size << " "
            << format_double(c.cv_accuracy) << "\n";
    out << "chosen_threshold " << result.chosen_threshold.str() << "\n";
    out << "validation_accuracy " << format_double(result.validation_accuracy) << "\n";
    out << "selected " << result.selected.size() << "\n";
    for (std::size_t j : result.selected)
        out << "feature " << j << " " << train.feature_names[j] << "\n";
    write_file(path, out.str());
}

SelectionReportData read_selection_report(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "stepsvm-selection v1")
        throw parse_error("'" + path + "': not a stepsvm-selection v1 file");
    SelectionReportData data;
    bool have_threshold = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "chosen_threshold") {
            std::string frac;
            ls >> frac;
            data.chosen_threshold = Fraction::parse(frac);
            have_threshold = true;
        } else if (tag == "validation_accuracy") {
            std::string v;
            ls >> v;
            auto d = parse_double(v);
            if (!d)
                throw parse_error("'" + path + "': bad validation_accuracy");
            data.validation_accuracy = *d;
        } else if (tag == "feature") {
            std::size_t idx = 0;
            std::string name;
            if (!(ls >> idx))
                throw parse_error("'" + path + "': malformed 'feature' line");
            std::getline(ls, name);
            if (!name.empty() && name.front() == ' ')
                name.erase(name.begin());
            data.selected.push_back(idx);
            data.selected_names.push_back(name);
        }
    }
    if (!have_threshold || data.selected.empty())
        throw parse_error("'" + path + "': incomplete selection report");
    return data;
}

} // namespace stepsvm
