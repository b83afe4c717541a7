#include "core/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/textio.hpp"

namespace stepsvm {

namespace {

constexpr double kCurvatureFloor = 1e-12;
constexpr std::size_t kMaxPairUpdates = 10'000'000;

// Pairwise working-set ascent on the dual
//   max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//   s.t. sum_i a_i y_i = 0,  0 <= a_i <= C.
// Internally minimizes f(a) = 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij and
// gradient G_i = (Qa)_i - 1. The working pair is the maximal violating pair
// with a second-order gain rule for the second index; updates are the exact
// two-variable solution clipped to the box. All scans run in ascending index
// order with strict comparisons, so training is deterministic.
class SmoSolver {
public:
    SmoSolver(const Matrix& K, const std::vector<int>& y, double cost, double eps)
        : K_(K), y_(y), C_(cost), eps_(eps), n_(y.size()),
          alpha_(n_, 0.0), G_(n_, -1.0) {}

    // Returns false when the pair-update cap was exhausted or the iterate
    // stopped moving above tolerance (possible with indefinite kernels).
    bool run() {
        std::size_t stalled = 0;
        while (iterations_ < kMaxPairUpdates && stalled <= 1000) {
            auto [i, j] = select_pair();
            if (i < 0) {
                // Converged against the incrementally maintained gradient;
                // rebuild it from scratch to rule out accumulated drift.
                recompute_gradient();
                auto [i2, j2] = select_pair();
                if (i2 < 0)
                    return true;
                i = i2;
                j = j2;
            }
            bool moved = update(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            ++iterations_;
            stalled = moved ? 0 : stalled + 1;
        }
        recompute_gradient();
        select_pair(); // refresh violation_
        return violation_ <= eps_;
    }

    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& gradient() const { return G_; }
    double violation() const { return violation_; }
    std::size_t iterations() const { return iterations_; }

    double dual_objective() const {
        // e'a - 1/2 a'Qa = 1/2 sum_i a_i (1 - G_i) given G = Qa - e.
        double w = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            w += alpha_[i] * (1.0 - G_[i]);
        return 0.5 * w;
    }

    double bias() const {
        // Mean of -y_i G_i over free support vectors; otherwise the midpoint
        // of the interval the bound points impose.
        double sum = 0.0;
        std::size_t free_count = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (alpha_[i] > 0.0 && alpha_[i] < C_) {
                sum += -y_[i] * G_[i];
                ++free_count;
            }
        if (free_count > 0)
            return sum / static_cast<double>(free_count);
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            double v = -y_[i] * G_[i];
            bool at_zero = alpha_[i] <= 0.0;
            if ((at_zero && y_[i] > 0) || (!at_zero && y_[i] < 0))
                lo = std::max(lo, v);
            else
                hi = std::min(hi, v);
        }
        if (!std::isfinite(lo))
            return std::isfinite(hi) ? hi : 0.0;
        if (!std::isfinite(hi))
            return lo;
        return 0.5 * (lo + hi);
    }

private:
    bool in_up(std::size_t t) const {
        return (y_[t] > 0 && alpha_[t] < C_) || (y_[t] < 0 && alpha_[t] > 0.0);
    }
    bool in_low(std::size_t t) const {
        return (y_[t] > 0 && alpha_[t] > 0.0) || (y_[t] < 0 && alpha_[t] < C_);
    }

    std::pair<int, int> select_pair() {
        double gmax = -std::numeric_limits<double>::infinity();
        int i = -1;
        for (std::size_t t = 0; t < n_; ++t)
            if (in_up(t)) {
                double v = -y_[t] * G_[t];
                if (v > gmax) {
                    gmax = v;
                    i = static_cast<int>(t);
                }
            }

        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        int j = -1;
        for (std::size_t t = 0; t < n_; ++t)
            if (in_low(t)) {
                double v = y_[t] * G_[t];
                if (v > gmax2)
                    gmax2 = v;
                if (i >= 0) {
                    double grad_diff = gmax + v;
                    if (grad_diff > 0.0) {
                        std::size_t ii = static_cast<std::size_t>(i);
                        double quad = K_(ii, ii) + K_(t, t) - 2.0 * K_(ii, t);
                        if (quad <= 0.0)
                            quad = kCurvatureFloor;
                        double gain = -(grad_diff * grad_diff) / quad;
                        if (gain < best_gain) {
                            best_gain = gain;
                            j = static_cast<int>(t);
                        }
                    }
                }
            }

        violation_ = gmax + gmax2;
        if (violation_ < eps_ || i < 0 || j < 0)
            return {-1, -1};
        return {i, j};
    }

    bool update(std::size_t i, std::size_t j) {
        double quad = K_(i, i) + K_(j, j) - 2.0 * K_(i, j);
        if (quad <= 0.0)
            quad = kCurvatureFloor;
        double old_ai = alpha_[i];
        double old_aj = alpha_[j];

        if (y_[i] != y_[j]) {
            double delta = (-G_[i] - G_[j]) / quad;
            double diff = alpha_[i] - alpha_[j];
            alpha_[i] += delta;
            alpha_[j] += delta;
            if (diff > 0.0) {
                if (alpha_[j] < 0.0) { alpha_[j] = 0.0; alpha_[i] = diff; }
            } else {
                if (alpha_[i] < 0.0) { alpha_[i] = 0.0; alpha_[j] = -diff; }
            }
            if (diff > 0.0) {
                if (alpha_[i] > C_) { alpha_[i] = C_; alpha_[j] = C_ - diff; }
            } else {
                if (alpha_[j] > C_) { alpha_[j] = C_; alpha_[i] = C_ + diff; }
            }
        } else {
            double delta = (G_[i] - G_[j]) / quad;
            double sum = alpha_[i] + alpha_[j];
            alpha_[i] -= delta;
            alpha_[j] += delta;
            if (sum > C_) {
                if (alpha_[i] > C_) { alpha_[i] = C_; alpha_[j] = sum - C_; }
            } else {
                if (alpha_[j] < 0.0) { alpha_[j] = 0.0; alpha_[i] = sum; }
            }
            if (sum > C_) {
                if (alpha_[j] > C_) { alpha_[j] = C_; alpha_[i] = sum - C_; }
            } else {
                if (alpha_[i] < 0.0) { alpha_[i] = 0.0; alpha_[j] = sum; }
            }
        }

        double dai = alpha_[i] - old_ai;
        double daj = alpha_[j] - old_aj;
        if (dai == 0.0 && daj == 0.0)
            return false;
        for (std::size_t t = 0; t < n_; ++t)
            G_[t] += y_[t] * (y_[i] * K_(i, t) * dai + y_[j] * K_(j, t) * daj);
        return true;
    }

    void recompute_gradient() {
        for (std::size_t t = 0; t < n_; ++t) {
            double g = -1.0;
            for (std::size_t s = 0; s < n_; ++s)
                if (alpha_[s] > 0.0)
                    g += y_[t] * y_[s] * K_(t, s) * alpha_[s];
            G_[t] = g;
        }
    }

    const Matrix& K_;
    const std::vector<int>& y_;
    double C_;
    double eps_;
    std::size_t n_;
    std::vector<double> alpha_;
    std::vector<double> G_;
    double violation_ = 0.0;
    std::size_t iterations_ = 0;
};

BinaryTraining package(const SmoSolver& solver, const Matrix& X, const std::vector<int>& y,
                       const KernelSpec& spec, double cost) {
    BinaryTraining t;
    t.full_alpha = solver.alpha();
    t.dual_objective = solver.dual_objective();

    BinarySvm& m = t.model;
    m.spec = spec;
    m.cost = cost;
    m.bias = solver.bias();
    m.iterations = solver.iterations();
    m.kkt_violation = solver.violation();

    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (t.full_alpha[i] > 0.0)
            sv.push_back(i);
    m.support_vectors = X.take_rows(sv);
    m.sv_indices = sv;
    for (std::size_t i : sv) {
        m.alpha.push_back(t.full_alpha[i]);
        m.sv_labels.push_back(y[i]);
    }

    double balance = 0.0;
    for (std::size_t i = 0; i < m.alpha.size(); ++i)
        balance += m.alpha[i] * m.sv_labels[i];
    if (std::abs(balance) >= 1e-8)
        throw solver_error("dual equality constraint violated: |sum alpha_i y_i| = " +
                           format_double(std::abs(balance)));
    return t;
}

} // namespace

double BinarySvm::decision_value(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        f += alpha[i] * sv_labels[i] * kernel_eval(spec, support_vectors.row(i), x);
    return f;
}

BinaryTraining train_binary(const Matrix& X, const std::vector<int>& y, KernelSpec spec,
                            double cost, double tol) {
    if (X.rows() != y.size())
        throw validation_error("train_binary: label count does not match sample count");
    if (X.rows() < 2)
        throw validation_error("train_binary: need at least 2 samples");
    if (cost <= 0.0)
        throw validation_error("train_binary: cost must be > 0");
    if (tol <= 0.0)
        throw validation_error("train_binary: tol must be > 0");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw validation_error("train_binary: labels must be +1 or -1");
    }
    if (!pos || !neg)
        throw validation_error("train_binary: both classes must be present");

    if (spec.needs_gamma() && !spec.gamma)
        spec.gamma = default_gamma(X);
    spec.validate();

    Matrix K = kernel_matrix(spec, X, X);
    double n_scale = static_cast<double>(X.rows()) * cost;
    double eps = tol / std::max(1.0, n_scale);
    SmoSolver solver(K, y, cost, std::max(eps, 1e-12));
    bool converged = solver.run();
    BinaryTraining t = package(solver, X, y, spec, cost);
    if (!converged) {
        std::ostringstream msg;
        msg << "SMO did not converge: max KKT violation " << format_double(solver.violation())
            << " after " << solver.iterations() << " pair updates";
        throw smo_nonconvergence(msg.str(), std::move(t));
    }
    return t;
}

std::pair<std::vector<int>, std::vector<double>> predict_binary(const BinarySvm& model,
                                                                const Matrix& X) {
    if (X.cols() != model.support_vectors.cols())
        throw validation_error("predict_binary: feature width does not match training width");
    std::vector<int> labels(X.rows());
    std::vector<double> values(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double f = model.decision_value(X.row(i));
        values[i] = f;
        labels[i] = f < 0.0 ? -1 : 1;
    }
    return {labels, values};
}

KktReport check_kkt(const BinaryTraining& t, const Matrix& X, const std::vector<int>& y) {
    KktReport r;
    const BinarySvm& m = t.model;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double margin = y[i] * m.decision_value(X.row(i));
        double a = t.full_alpha[i];
        double v = 0.0;
        if (a <= 0.0)
            v = std::max(0.0, 1.0 - margin);
        else if (a >= m.cost)
            v = std::max(0.0, margin - 1.0);
        else
            v = std::abs(margin - 1.0);
        r.max_violation = std::max(r.max_violation, v);
    }
    double balance = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        balance += t.full_alpha[i] * y[i];
    r.alpha_y_sum = std::abs(balance);
    return r;
}

SvmModel train_multiclass(const Dataset& d, const KernelSpec& spec, double cost, double tol) {
    d.validate();
    std::size_t k = d.class_count();

    KernelSpec resolved = spec;
    if (resolved.needs_gamma() && !resolved.gamma)
        resolved.gamma = default_gamma(d.features);

    SvmModel model;
    model.class_count = k;
    for (int a = 0; a < static_cast<int>(k); ++a) {
        for (int b = a + 1; b < static_cast<int>(k); ++b) {
            std::vector<std::size_t> rows;
            std::vector<int> y;
            for (std::size_t i = 0; i < d.n(); ++i) {
                if (d.labels[i] == a || d.labels[i] == b) {
                    rows.push_back(i);
                    y.push_back(d.labels[i] == a ? 1 : -1);
                }
            }
            Matrix sub = d.features.take_rows(rows);
            try {
                BinaryTraining t = train_binary(sub, y, resolved, cost, tol);
                model.pairs.push_back({a, b, std::move(t.model)});
            } catch (const smo_nonconvergence& e) {
                throw solver_error("training pair (" + d.class_names[a] + ", " +
                                   d.class_names[b] + ") failed: " + e.what());
            }
        }
    }
    return model;
}

std::vector<int> predict_multiclass(const SvmModel& model, const Matrix& X) {
    if (model.pairs.empty())
        throw validation_error("predict_multiclass: empty model");
    for (const auto& pm : model.pairs)
        if (X.cols() != pm.svm.support_vectors.cols())
            throw validation_error("predict_multiclass: feature width mismatch");

    std::vector<std::vector<int>> votes(X.rows(), std::vector<int>(model.class_count, 0));
    for (const auto& pm : model.pairs) {
        auto [labels, values] = predict_binary(pm.svm, X);
        for (std::size_t i = 0; i < X.rows(); ++i)
            ++votes[i][static_cast<std::size_t>(labels[i] > 0 ? pm.class_a : pm.class_b)];
    }
    std::vector<int> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        int best = 0;
        for (std::size_t c = 1; c < model.class_count; ++c)
            if (votes[i][c] > votes[i][static_cast<std::size_t>(best)])
                best = static_cast<int>(c);
        out[i] = best;
    }
    return out;
}

Fraction apparent_error_rate(const SvmModel& model, const Dataset& train) {
    auto pred = predict_multiclass(model, train.features);
    std::int64_t errors = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] != train.labels[i])
            ++errors;
    return Fraction::of(errors, static_cast<std::int64_t>(train.n()));
}

void save_model(const SvmModel& model, const std::string& path) {
    std::ostringstream out;
    out << "stepsvm-model v1\n";
    out << "classes " << model.class_count << "\n";
    out << "pairs " << model.pairs.size() << "\n";
    for (const auto& pm : model.pairs) {
        const BinarySvm& m = pm.svm;
        out << "pair " << pm.class_a << " " << pm.class_b << "\n";
        out << "kernel " << m.spec.str() << "\n";
        out << "cost " << format_double(m.cost) << "\n";
        out << "bias " << format_double(m.bias) << "\n";
        out << "svs " << m.alpha.size() << " " << m.support_vectors.cols() << "\n";
        for (std::size_t i = 0; i < m.alpha.size(); ++i) {
            out << "sv " << format_double(m.alpha[i]) << " " << m.sv_labels[i] << " "
                << m.sv_indices[i];
            for (std::size_t j = 0; j < m.support_vectors.cols(); ++j)
                out << " " << format_double(m.support_vectors(i, j));
            out << "\n";
        }
    }
    out << "end\n";
    write_file(path, out.str());
}

namespace {

std::vector<std::string> next_tokens(std::istringstream& in, const std::string& path) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t)
            toks.push_back(t);
        return toks;
    }
    throw parse_error("'" + path + "': truncated model file");
}

double tok_double(const std::vector<std::string>& toks, std::size_t i, const std::string& path) {
    if (i >= toks.size())
        throw parse_error("'" + path + "': missing field in model file");
    auto v = parse_double(toks[i]);
    if (!v)
        throw parse_error("'" + path + "': bad numeric field '" + toks[i] + "'");
    return *v;
}

} // namespace

SvmModel load_model(const std::string& path) {
    std::istringstream in(read_file(path));
    auto header = next_tokens(in, path);
    if (header.size() != 2 || header[0] != "stepsvm-model" || header[1] != "v1")
        throw parse_error("'" + path + "': not a stepsvm-model v1 file");

    auto classes = next_tokens(in, path);
    if (classes.size() != 2 || classes[0] != "classes")
        throw parse_error("'" + path + "': expected 'classes'");
    SvmModel model;
    model.class_count = static_cast<std::size_t>(tok_double(classes, 1, path));

    auto pairs = next_tokens(in, path);
    if (pairs.size() != 2 || pairs[0] != "pairs")
        throw parse_error("'" + path + "': expected 'pairs'");
    std::size_t pair_count = static_cast<std::size_t>(tok_double(pairs, 1, path));

    for (std::size_t pi = 0; pi < pair_count; ++pi) {
        auto pair_line = next_tokens(in, path);
        if (pair_line.size() != 3 || pair_line[0] != "pair")
            throw parse_error("'" + path + "': expected 'pair'");
        PairwiseModel pm;
        pm.class_a = static_cast<int>(tok_double(pair_line, 1, path));
        pm.class_b = static_cast<int>(tok_double(pair_line, 2, path));

        auto kernel_line = next_tokens(in, path);
        if (kernel_line.size() != 2 || kernel_line[0] != "kernel")
            throw parse_error("'" + path + "': expected 'kernel'");
        pm.svm.spec = KernelSpec::parse(kernel_line[1]);

        auto cost_line = next_tokens(in, path);
        if (cost_line.size() != 2 || cost_line[0] != "cost")
            throw parse_error("'" + path + "': expected 'cost'");
        pm.svm.cost = tok_double(cost_line, 1, path);

        auto bias_line = next_tokens(in, path);
        if (bias_line.size() != 2 || bias_line[0] != "bias")
            throw parse_error("'" + path + "': expected 'bias'");
        pm.svm.bias = tok_double(bias_line, 1, path);

        auto svs_line = next_tokens(in, path);
        if (svs_line.size() != 3 || svs_line[0] != "svs")
            throw parse_error("'" + path + "': expected 'svs'");
        std::size_t count = static_cast<std::size_t>(tok_double(svs_line, 1, path));
        std::size_t width = static_cast<std::size_t>(tok_double(svs_line, 2, path));

        pm.svm.support_vectors = Matrix(count, width);
        for (std::size_t i = 0; i < count; ++i) {
            auto sv = next_tokens(in, path);
            if (sv.size() != 4 + width || sv[0] != "sv")
                throw parse_error("'" + path + "': malformed 'sv' line");
            pm.svm.alpha.push_back(tok_double(sv, 1, path));
            pm.svm.sv_labels.push_back(static_cast<int>(tok_double(sv, 2, path)));
            pm.svm.sv_indices.push_back(static_cast<std::size_t>(tok_double(sv, 3, path)));
            for (std::size_t j = 0; j < width; ++j)
                pm.svm.support_vectors(i, j) = tok_double(sv, 4 + j, path);
        }
        model.pairs.push_back(std::move(pm));
    }
    auto tail = next_tokens(in, path);
    if (tail.size() != 1 || tail[0] != "end")
        throw parse_error("'" + path + "': expected 'end'");
    return model;
}

} // namespace stepsvm
