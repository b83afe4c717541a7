#include "core/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace stepsvm {

int tree_predict_row(const DecisionTree& tree, std::span<const double> row) {
    int node = 0;
    for (;;) {
        const TreeNode& t = tree.nodes[static_cast<std::size_t>(node)];
        if (t.feature < 0)
            return t.leaf_class;
        node = row[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
    }
}

namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0)
        return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        double f = static_cast<double>(c) / static_cast<double>(total);
        g -= f * f;
    }
    return g;
}

int majority_class(const std::vector<std::size_t>& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best])
            best = c;
    return static_cast<int>(best);
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    std::size_t k;
    std::size_t mtry;
    std::size_t n_total;
    Rng& rng;
    DecisionTree tree;
    std::vector<double>& importance; // accumulated Gini decrease, this tree

    int build(std::vector<std::size_t>& samples) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i : samples)
            ++counts[static_cast<std::size_t>(y[i])];
        double node_gini = gini(counts, samples.size());

        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (samples.size() < 2 || node_gini == 0.0) {
            tree.nodes[static_cast<std::size_t>(id)].leaf_class = majority_class(counts);
            return id;
        }

        // mtry candidate features, then evaluated in ascending id order so
        // tie-breaking is stable.
        std::size_t p = x.cols();
        std::vector<std::size_t> pool(p);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.next_below(p - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> candidates(pool.begin(),
                                            pool.begin() + static_cast<std::ptrdiff_t>(mtry));
        std::sort(candidates.begin(), candidates.end());

        double best_decrease = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::pair<double, int>> ordered(samples.size());
        for (std::size_t f : candidates) {
            for (std::size_t t = 0; t < samples.size(); ++t)
                ordered[t] = {x(samples[t], f), y[samples[t]]};
            std::sort(ordered.begin(), ordered.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::vector<std::size_t> left(k, 0);
            std::vector<std::size_t> right = counts;
            std::size_t n = samples.size();
            for (std::size_t t = 0; t + 1 < n; ++t) {
                auto cls = static_cast<std::size_t>(ordered[t].second);
                ++left[cls];
                --right[cls];
                if (ordered[t].first == ordered[t + 1].first)
                    continue;
                std::size_t nl = t + 1, nr = n - nl;
                double decrease = node_gini -
                                  (static_cast<double>(nl) / static_cast<double>(n)) * gini(left, nl) -
                                  (static_cast<double>(nr) / static_cast<double>(n)) * gini(right, nr);
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = f;
                    best_threshold = 0.5 * (ordered[t].first + ordered[t + 1].first);
                    found = true;
                }
            }
        }

        if (!found) {
            tree.nodes[static_cast<std::size_t>(id)].leaf_class = majority_class(counts);
            return id;
        }

        std::vector<std::size_t> left_samples, right_samples;
        for (std::size_t i : samples)
            (x(i, best_feature) <= best_threshold ? left_samples : right_samples).push_back(i);

        importance[best_feature] +=
            best_decrease * static_cast<double>(samples.size()) / static_cast<double>(n_total);

        int left_id = build(left_samples);
        int right_id = build(right_samples);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        return id;
    }
};

} // namespace

ForestModel forest_train(const Dataset& train, std::size_t n_trees, std::size_t mtry,
                         std::uint64_t seed, int threads) {
    train.validate();
    if (n_trees < 1)
        throw validation_error("forest_train: n_trees must be >= 1");
    if (mtry < 1 || mtry > train.p())
        throw validation_error("forest_train: mtry must be in [1, p]");

    std::size_t n = train.n();
    std::size_t k = train.class_count();

    ForestModel model;
    model.n_trees = n_trees;
    model.mtry = mtry;
    model.trees.resize(n_trees);

    std::vector<std::vector<double>> tree_importance(n_trees,
                                                     std::vector<double>(train.p(), 0.0));
    std::vector<std::vector<std::pair<std::size_t, int>>> oob_votes(n_trees);

    parallel_for(n_trees, threads, [&](std::size_t t) {
        Rng rng(mix_seed(seed, t));
        std::vector<std::size_t> sample(n);
        std::vector<bool> in_bag(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            sample[i] = static_cast<std::size_t>(rng.next_below(n));
            in_bag[sample[i]] = true;
        }
        TreeBuilder builder{train.features, train.labels, k, mtry, n, rng,
                            {},             tree_importance[t]};
        builder.build(sample);
        model.trees[t] = std::move(builder.tree);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_bag[i])
                oob_votes[t].push_back(
                    {i, tree_predict_row(model.trees[t], train.features.row(i))});
    });

    model.importances.assign(train.p(), 0.0);
    for (const auto& imp : tree_importance)
        for (std::size_t j = 0; j < train.p(); ++j)
            model.importances[j] += imp[j];
    double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0.0)
        for (double& v : model.importances)
            v /= total;

    // Out-of-bag vote aggregation runs sequentially over tree index so the
    // result is independent of scheduling.
    std::vector<std::vector<std::size_t>> votes(n, std::vector<std::size_t>(k, 0));
    for (std::size_t t = 0; t < n_trees; ++t)
        for (auto [i, cls] : oob_votes[t])
            ++votes[i][static_cast<std::size_t>(cls)];
    std::size_t scored = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t total_votes = std::accumulate(votes[i].begin(), votes[i].end(), 0ull);
        if (total_votes == 0)
            continue;
        ++scored;
        if (majority_class(votes[i]) == train.labels[i])
            ++correct;
    }
    model.oob_accuracy =
        scored == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(scored);
    return model;
}

std::vector<int> forest_predict(const ForestModel& model, const Matrix& x) {
    if (model.trees.empty())
        throw validation_error("forest_predict: empty model");
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::vector<std::size_t> votes;
        for (const auto& tree : model.trees) {
            int cls = tree_predict_row(tree, x.row(i));
            if (static_cast<std::size_t>(cls) >= votes.size())
                votes.resize(static_cast<std::size_t>(cls) + 1, 0);
            ++votes[static_cast<std::size_t>(cls)];
        }
        out[i] = majority_class(votes);
    }
    return out;
}

RfeResult rf_rfe(const Dataset& train, std::size_t n_trees, std::uint64_t seed,
                 std::optional<std::size_t> mtry, int threads) {
    train.validate();
    if (train.p() < 2)
        throw validation_error("rf_rfe: need at least 2 features");

    RfeResult result;
    std::vector<std::size_t> active(train.p());
    std::iota(active.begin(), active.end(), 0);

    for (std::size_t round = 0;; ++round) {
        Dataset sub = train.subset_cols(active);
        std::size_t q = active.size();
        std::size_t m = mtry ? std::min(*mtry, q)
                             : std::max<std::size_t>(
                                   1, static_cast<std::size_t>(std::floor(std::sqrt(
                                          static_cast<double>(q)))));
        ForestModel forest = forest_train(sub, n_trees, m, mix_seed(seed, round), threads);
        result.trace.push_back({active, forest.oob_accuracy});
        if (q == 1)
            break;

        // Drop the floor(q/2) lowest-importance features; equal importances
        // drop the larger original index first.
        std::size_t drop = q / 2;
        std::vector<std::size_t> order(q);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (forest.importances[a] != forest.importances[b])
                return forest.importances[a] < forest.importances[b];
            return active[a] > active[b];
        });
        std::vector<bool> dropped(q, false);
        for (std::size_t i = 0; i < drop; ++i)
            dropped[order[i]] = true;
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < q; ++i)
            if (!dropped[i])
                next.push_back(active[i]);
        active = std::move(next);
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < result.trace.size(); ++r)
        if (result.trace[r].oob_accuracy >= result.trace[best].oob_accuracy)
            best = r; // >= so equal accuracy prefers the smaller, later subset
    result.best_subset = result.trace[best].features;
    return result;
}

std::string rfe_trace_text(const RfeResult& result) {
    std::ostringstream out;
    out << "stepsvm-trace v1\n";
    out << "method rf_rfe\n";
    out << "candidates " << result.trace.size() << "\n";
    for (std::size_t r = 0; r < result.trace.size(); ++r)
        out << "candidate " << r << " " << result.trace[r].features.size() << " "
            << format_double(result.trace[r].oob_accuracy) << "\n";
    out << "chosen_size " << result.best_subset.size() << "\n";
    return out.str();
}

} // namespace stepsvm
