#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "core/correlation.hpp"
#include "core/forest.hpp"
#include "core/parallel.hpp"
#include "core/pca.hpp"
#include "core/rng.hpp"
#include "core/stepwise.hpp"
#include "core/svm.hpp"
#include "core/textio.hpp"

namespace stepsvm {

std::string method_name(Method m) {
    switch (m) {
    case Method::stepwise: return "stepwise";
    case Method::original: return "original";
    case Method::pca: return "pca";
    case Method::correlation: return "correlation";
    case Method::rf_rfe: return "rf_rfe";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "stepwise") return Method::stepwise;
    if (name == "original") return Method::original;
    if (name == "pca") return Method::pca;
    if (name == "correlation") return Method::correlation;
    if (name == "rf_rfe") return Method::rf_rfe;
    return std::nullopt;
}

std::string MethodConfig::serialize() const {
    std::string s = method_name(method);
    s += " kernel_predict=" + predict_kernel.str();
    s += " cost=" + format_double(cost);
    switch (method) {
    case Method::stepwise:
        s += " kernel_select=" + select_kernel.str();
        s += " folds=" + std::to_string(folds);
        s += " cv_repeats=" + std::to_string(cv_repeats);
        if (fixed_threshold)
            s += " threshold=" + fixed_threshold->str();
        break;
    case Method::original:
        break;
    case Method::pca:
        if (max_components)
            s += " components=" + std::to_string(*max_components);
        break;
    case Method::correlation: {
        s += " thresholds=";
        for (std::size_t i = 0; i < corr_thresholds.size(); ++i)
            s += (i ? "|" : "") + format_double(corr_thresholds[i]);
        break;
    }
    case Method::rf_rfe:
        s += " trees=" + std::to_string(n_trees);
        if (mtry)
            s += " mtry=" + std::to_string(*mtry);
        break;
    }
    return s;
}

MethodConfig MethodConfig::deserialize(const std::string& line) {
    std::istringstream in(line);
    std::string name;
    in >> name;
    auto m = parse_method(name);
    if (!m)
        throw validation_error("unknown method '" + name + "'");
    MethodConfig cfg;
    cfg.method = *m;
    std::string kv;
    while (in >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw validation_error("bad method option '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        bool ok = false;
        if (key == "kernel_predict") {
            cfg.predict_kernel = KernelSpec::parse(val);
            ok = true;
        } else if (key == "cost") {
            auto v = parse_double(val);
            if (!v || *v <= 0.0)
                throw validation_error("bad cost '" + val + "'");
            cfg.cost = *v;
            ok = true;
        } else if (key == "kernel_select" && cfg.method == Method::stepwise) {
            cfg.select_kernel = KernelSpec::parse(val);
            ok = true;
        } else if (key == "folds" && cfg.method == Method::stepwise) {
            cfg.folds = std::stoi(val);
            ok = true;
        } else if (key == "cv_repeats" && cfg.method == Method::stepwise) {
            cfg.cv_repeats = std::stoi(val);
            ok = true;
        } else if (key == "threshold" && cfg.method == Method::stepwise) {
            cfg.fixed_threshold = Fraction::parse(val);
            ok = true;
        } else if (key == "components" && cfg.method == Method::pca) {
            cfg.max_components = static_cast<std::size_t>(std::stoul(val));
            ok = true;
        } else if (key == "thresholds" && cfg.method == Method::correlation) {
            cfg.corr_thresholds.clear();
            for (const auto& piece : split(val, '|')) {
                auto v = parse_double(piece);
                if (!v)
                    throw validation_error("bad correlation threshold '" + piece + "'");
                cfg.corr_thresholds.push_back(*v);
            }
            ok = true;
        } else if (key == "trees" && cfg.method == Method::rf_rfe) {
            cfg.n_trees = static_cast<std::size_t>(std::stoul(val));
            ok = true;
        } else if (key == "mtry" && cfg.method == Method::rf_rfe) {
            cfg.mtry = static_cast<std::size_t>(std::stoul(val));
            ok = true;
        }
        if (!ok)
            throw validation_error("option '" + key + "' does not apply to method '" + name +
                                   "'");
    }
    return cfg;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size())
        throw validation_error("accuracy: length mismatch");
    if (predicted.empty())
        throw validation_error("accuracy: empty inputs");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

namespace {

struct RepOutcome {
    double acc = std::numeric_limits<double>::quiet_NaN();
    long long selected = -1;
    std::string failure;
};

double svm_test_accuracy(const Dataset& train, const Dataset& test, const KernelSpec& spec,
                         double cost) {
    SvmModel model = train_multiclass(train, spec, cost);
    auto pred = predict_multiclass(model, test.features);
    return accuracy(pred, test.labels);
}

RepOutcome run_method_once(const MethodConfig& cfg, const Dataset& train, const Dataset& test,
                           std::uint64_t rep_seed) {
    RepOutcome out;
    switch (cfg.method) {
    case Method::stepwise: {
        SelectOptions opts;
        opts.select_kernel = cfg.select_kernel;
        opts.predict_kernel = cfg.predict_kernel;
        opts.cost = cfg.cost;
        opts.folds = cfg.folds;
        opts.cv_repeats = cfg.cv_repeats;
        opts.seed = rep_seed;
        opts.fixed_threshold = cfg.fixed_threshold;
        SelectionResult sel = select_features(train, opts);
        Dataset rtrain = reduce(train, sel.selected);
        Dataset rtest = reduce(test, sel.selected);
        out.acc = svm_test_accuracy(rtrain, rtest, cfg.predict_kernel, cfg.cost);
        out.selected = static_cast<long long>(sel.selected.size());
        break;
    }
    case Method::original:
        out.acc = svm_test_accuracy(train, test, cfg.predict_kernel, cfg.cost);
        break;
    case Method::pca: {
        std::size_t cap = std::min(train.n() - 1, train.p());
        if (cfg.max_components)
            cap = std::min(cap, *cfg.max_components);
        PcaBasis basis = pca_fit(train, cap);
        PcaSearchResult search = pca_svm_search(train, test, basis, cfg.predict_kernel,
                                                cfg.cost);
        out.acc = search.accuracy[search.best_k - 1];
        out.selected = static_cast<long long>(search.best_k);
        break;
    }
    case Method::correlation: {
        CorrelationSweepResult sweep = sweep_correlation_thresholds(
            train, test, cfg.corr_thresholds, cfg.predict_kernel, cfg.cost);
        const auto& best = sweep.entries[sweep.best_index];
        out.acc = best.accuracy;
        out.selected = static_cast<long long>(best.kept_count);
        break;
    }
    case Method::rf_rfe: {
        RfeResult rfe = rf_rfe(train, cfg.n_trees, rep_seed, cfg.mtry);
        Dataset rtrain = reduce(train, rfe.best_subset);
        Dataset rtest = reduce(test, rfe.best_subset);
        out.acc = svm_test_accuracy(rtrain, rtest, cfg.predict_kernel, cfg.cost);
        out.selected = static_cast<long long>(rfe.best_subset.size());
        break;
    }
    }
    return out;
}

std::uint64_t split_digest(const SplitIndices& split) {
    Digest d;
    d.update_u64(split.train.size());
    for (std::size_t i : split.train)
        d.update_u64(i);
    d.update_u64(split.test.size());
    for (std::size_t i : split.test)
        d.update_u64(i);
    return d.value();
}

std::string percent(double frac) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", frac * 100.0);
    return buf;
}

} // namespace

EvaluationReport run_benchmark(const Dataset& d, const std::vector<MethodConfig>& methods,
                               std::size_t repetitions, std::uint64_t master_seed,
                               bool standardize_features, int threads) {
    d.validate();
    if (methods.empty())
        throw validation_error("run_benchmark: no methods configured");
    if (repetitions < 1)
        throw validation_error("run_benchmark: repetitions must be >= 1");

    EvaluationReport report;
    report.methods = methods;
    report.repetitions = repetitions;
    report.master_seed = master_seed;
    report.standardized = standardize_features;
    report.data_digest = dataset_digest(d);
    report.split_seeds.resize(repetitions);
    report.split_digests.resize(repetitions);

    report.outcomes.resize(methods.size());
    for (auto& o : report.outcomes) {
        o.accuracies.assign(repetitions, std::numeric_limits<double>::quiet_NaN());
        o.failures.assign(repetitions, "");
        o.selected_counts.assign(repetitions, -1);
    }

    parallel_for(repetitions, threads, [&](std::size_t r) {
        std::uint64_t seed = mix_seed(master_seed, r);
        report.split_seeds[r] = seed;
        SplitIndices split = stratified_half_split(d, seed);
        report.split_digests[r] = split_digest(split);

        Dataset train = d.subset_rows(split.train);
        Dataset test = d.subset_rows(split.test);
        if (standardize_features) {
            auto [std_train, stats] = standardize(train);
            train = std::move(std_train);
            test = standardize_with(test, stats);
        }

        for (std::size_t m = 0; m < methods.size(); ++m) {
            try {
                RepOutcome out = run_method_once(methods[m], train, test, seed);
                report.outcomes[m].accuracies[r] = out.acc;
                report.outcomes[m].selected_counts[r] = out.selected;
            } catch (const std::exception& e) {
                report.outcomes[m].failures[r] = e.what();
            }
        }
    });

    for (auto& o : report.outcomes) {
        std::vector<double> valid;
        for (double a : o.accuracies)
            if (!std::isnan(a))
                valid.push_back(a);
        o.missing = repetitions - valid.size();
        auto ms = mean_sd(valid);
        o.mean = valid.empty() ? 0.0 : ms.mean;
        o.sd = ms.sd;
    }

    assign_ranks(report.outcomes);
    return report;
}

void assign_ranks(std::vector<MethodOutcome>& outcomes) {
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].mean > outcomes[b].mean;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        outcomes[order[pos]].rank = static_cast<int>(pos + 1);
}

std::string rank_table(const EvaluationReport& report) {
    std::ostringstream out;
    out << "run";
    for (const auto& m : report.methods)
        out << "\t" << method_name(m.method);
    out << "\n" << report.dataset_label;
    for (const auto& o : report.outcomes)
        out << "\t" << percent(o.mean) << "^(" << o.rank << ")";
    out << "\n";
    out << "note: cells are mean accuracy percent over " << report.repetitions
        << " repetitions; ranks break ties by method declaration order\n";
    out << "\nmethod\tmean%\tsd%\trank\tmissing\tmean_selected\n";
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        const auto& o = report.outcomes[m];
        double sel_sum = 0.0;
        std::size_t sel_n = 0;
        for (long long c : o.selected_counts)
            if (c >= 0) {
                sel_sum += static_cast<double>(c);
                ++sel_n;
            }
        out << method_name(report.methods[m].method) << "\t" << percent(o.mean) << "\t"
            << percent(o.sd) << "\t" << o.rank << "\t" << o.missing << "\t";
        if (sel_n > 0) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.1f", sel_sum / static_cast<double>(sel_n));
            out << buf;
        } else {
            out << "-";
        }
        out << "\n";
    }
    return out.str();
}

std::string rank_table_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "run";
    for (const auto& m : report.methods)
        out << "," << method_name(m.method) << "_mean_pct," << method_name(m.method) << "_rank";
    out << "\n" << report.dataset_label;
    for (const auto& o : report.outcomes)
        out << "," << percent(o.mean) << "," << o.rank;
    out << "\n";
    return out.str();
}

std::string accuracies_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "repetition,split_seed";
    for (const auto& m : report.methods)
        out << "," << method_name(m.method) << "_accuracy," << method_name(m.method)
            << "_selected";
    out << "\n";
    for (std::size_t r = 0; r < report.repetitions; ++r) {
        out << r << "," << Digest::hex(report.split_seeds[r]);
        for (const auto& o : report.outcomes) {
            out << ",";
            if (std::isnan(o.accuracies[r]))
                out << "NA";
            else
                out << format_double(o.accuracies[r]);
            out << ",";
            if (o.selected_counts[r] < 0)
                out << "NA";
            else
                out << o.selected_counts[r];
        }
        out << "\n";
    }
    return out.str();
}

std::string manifest_text(const EvaluationReport& report) {
    std::ostringstream out;
    out << "stepsvm-manifest v1\n";
    out << "command compare\n";
    out << "dataset_path " << report.dataset_path << "\n";
    out << "dataset_label " << report.dataset_label << "\n";
    out << "orientation " << report.orientation << "\n";
    out << "label_col " << (report.label_column.empty() ? "-" : report.label_column) << "\n";
    out << "standardize " << (report.standardized ? 1 : 0) << "\n";
    out << "dataset_digest " << Digest::hex(report.data_digest) << "\n";
    out << "repetitions " << report.repetitions << "\n";
    out << "master_seed " << report.master_seed << "\n";
    out << "seed_derivation splitmix64(master_seed + golden*(r+1))\n";
    out << "methods " << report.methods.size() << "\n";
    for (const auto& m : report.methods)
        out << "method " << m.serialize() << "\n";
    for (std::size_t r = 0; r < report.repetitions; ++r)
        out << "split " << r << " " << Digest::hex(report.split_seeds[r]) << " "
            << Digest::hex(report.split_digests[r]) << "\n";
    return out.str();
}

EvaluationReport replay_manifest(const std::string& manifest_path, int threads) {
    std::istringstream in(read_file(manifest_path));
    std::string line;
    if (!std::getline(in, line) || line != "stepsvm-manifest v1")
        throw parse_error("'" + manifest_path + "': not a stepsvm-manifest v1 file");

    std::string dataset_path, dataset_label, orientation = "samples", label_col;
    bool standardize_features = true;
    std::size_t repetitions = 0;
    std::uint64_t master_seed = 0;
    std::string digest_hex;
    std::vector<MethodConfig> methods;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto space = line.find(' ');
        std::string key = line.substr(0, space);
        std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
        if (key == "dataset_path") dataset_path = rest;
        else if (key == "dataset_label") dataset_label = rest;
        else if (key == "orientation") orientation = rest;
        else if (key == "label_col") label_col = rest == "-" ? "" : rest;
        else if (key == "standardize") standardize_features = rest == "1";
        else if (key == "repetitions") repetitions = std::stoul(rest);
        else if (key == "master_seed") master_seed = std::stoull(rest);
        else if (key == "dataset_digest") digest_hex = rest;
        else if (key == "method") methods.push_back(MethodConfig::deserialize(rest));
    }
    if (dataset_path.empty() || repetitions == 0 || methods.empty())
        throw parse_error("'" + manifest_path + "': incomplete manifest");

    Dataset d = load_csv(dataset_path,
                         orientation == "features" ? CsvOrientation::features_as_rows
                                                   : CsvOrientation::samples_as_rows,
                         label_col);
    if (!digest_hex.empty() && Digest::hex(dataset_digest(d)) != digest_hex)
        throw validation_error("replay: dataset at '" + dataset_path +
                               "' does not match the manifest digest");

    EvaluationReport report =
        run_benchmark(d, methods, repetitions, master_seed, standardize_features, threads);
    report.dataset_label = dataset_label;
    report.dataset_path = dataset_path;
    report.orientation = orientation;
    report.label_column = label_col;
    return report;
}

} // namespace stepsvm
