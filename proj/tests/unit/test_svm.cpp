#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/dataset.hpp"
#include "core/rng.hpp"
#include "core/svm.hpp"
#include "qp_oracle.hpp"

using namespace stepsvm;
using stepsvm_test::oracle_decision;
using stepsvm_test::solve_dual_exact;

namespace {

KernelSpec linear_kernel() {
    KernelSpec s;
    s.family = KernelFamily::linear;
    return s;
}

KernelSpec rbf_kernel(double gamma) {
    KernelSpec s;
    s.family = KernelFamily::rbf;
    s.gamma = gamma;
    return s;
}

Dataset tiny_dataset(const Matrix& x, const std::vector<int>& labels, std::size_t k) {
    Dataset d;
    d.features = x;
    d.labels = labels;
    for (std::size_t j = 0; j < x.cols(); ++j)
        d.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < x.rows(); ++i)
        d.sample_names.push_back("s" + std::to_string(i));
    for (std::size_t c = 0; c < k; ++c)
        d.class_names.push_back("c" + std::to_string(c));
    return d;
}

// Always-positive or always-negative 1-D binary vote, for handcrafted
// multiclass models: f(x) = 0*x + bias.
BinarySvm constant_vote(double bias) {
    BinarySvm m;
    m.support_vectors = Matrix::from_rows({{0.0}, {0.0}});
    m.alpha = {1.0, 1.0};
    m.sv_labels = {1, -1}; // contributions cancel, leaving the bias
    m.sv_indices = {0, 1};
    m.bias = bias;
    m.spec = linear_kernel();
    m.cost = 1.0;
    return m;
}

} // namespace

TEST_CASE("two opposite points solve to the hand-derived dual optimum") {
    // x = -1 labeled -1, x = +1 labeled +1, linear kernel: the dual reduces
    // to maximizing 2a - 2a^2, so alpha = 1/2 and f(x) = x.
    Matrix x = Matrix::from_rows({{-1.0}, {1.0}});
    std::vector<int> y{-1, 1};
    BinaryTraining t = train_binary(x, y, linear_kernel(), 10.0, 1e-6);

    REQUIRE(t.full_alpha.size() == 2);
    CHECK(t.full_alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(t.full_alpha[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(t.model.bias == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(t.dual_objective == doctest::Approx(0.5).epsilon(1e-6));

    // Both points sit exactly on the margin.
    CHECK(t.model.decision_value(x.row(0)) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(t.model.decision_value(x.row(1)) == doctest::Approx(1.0).epsilon(1e-6));

    Matrix probe = Matrix::from_rows({{0.25}});
    auto [labels, values] = predict_binary(t.model, probe);
    CHECK(labels[0] == 1);
    CHECK(values[0] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("an exact zero decision value maps to +1") {
    BinarySvm m = constant_vote(0.0);
    auto [labels, values] = predict_binary(m, Matrix::from_rows({{3.0}}));
    CHECK(values[0] == 0.0);
    CHECK(labels[0] == 1);
}

TEST_CASE("xor with an rbf kernel matches the exact dual oracle") {
    Matrix x = Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
    std::vector<int> y{1, 1, -1, -1};
    KernelSpec spec = rbf_kernel(1.0);
    BinaryTraining t = train_binary(x, y, spec, 10.0, 1e-8);

    auto [labels, values] = predict_binary(t.model, x);
    CHECK(labels == y);

    Matrix k = kernel_matrix(spec, x, x);
    auto oracle = solve_dual_exact(k, y, 10.0);
    REQUIRE(oracle.found);
    CHECK(std::abs(t.dual_objective - oracle.objective) <=
          1e-6 * (1.0 + std::abs(oracle.objective)));
}

TEST_CASE("a separable problem with large cost trains to zero errors") {
    Rng rng(17);
    Matrix x(20, 2);
    std::vector<int> y;
    for (std::size_t i = 0; i < 20; ++i) {
        int label = i < 10 ? -1 : 1;
        x(i, 0) = rng.next_normal() + (label > 0 ? 4.0 : -4.0);
        x(i, 1) = rng.next_normal();
        y.push_back(label);
    }
    BinaryTraining t = train_binary(x, y, linear_kernel(), 1e3);
    auto [labels, values] = predict_binary(t.model, x);
    CHECK(labels == y);

    // Monotone cost: the tightly boxed model cannot do better.
    BinaryTraining loose = train_binary(x, y, linear_kernel(), 1e-3);
    auto [loose_labels, lv] = predict_binary(loose.model, x);
    std::size_t err_tight = 0, err_loose = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        err_tight += labels[i] != y[i];
        err_loose += loose_labels[i] != y[i];
    }
    CHECK(err_tight <= err_loose);
}

TEST_CASE("training rejects degenerate inputs") {
    Matrix x = Matrix::from_rows({{0.0}, {1.0}});
    CHECK_THROWS_AS(train_binary(x, {1, 1}, linear_kernel(), 1.0), validation_error);
    CHECK_THROWS_AS(train_binary(x, {1, 2}, linear_kernel(), 1.0), validation_error);
    CHECK_THROWS_AS(train_binary(x, {1, -1}, linear_kernel(), -1.0), validation_error);
    CHECK_THROWS_AS(train_binary(x, {1, -1}, linear_kernel(), 1.0, 0.0), validation_error);
    CHECK_THROWS_AS(train_binary(x, {1}, linear_kernel(), 1.0), validation_error);

    BinaryTraining t = train_binary(x, {-1, 1}, linear_kernel(), 1.0);
    CHECK_THROWS_AS(predict_binary(t.model, Matrix::from_rows({{1.0, 2.0}})), validation_error);
}

TEST_CASE("random small problems match the oracle and satisfy kkt") {
    Rng rng(91);
    int agree = 0, total = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + rng.next_below(7);
        std::size_t q = 1 + rng.next_below(3);
        Matrix x(n, q);
        std::vector<int> y(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.next_unit() < 0.5 ? -1 : 1;
            (y[i] > 0 ? pos : neg) = true;
            for (std::size_t j = 0; j < q; ++j)
                x(i, j) = rng.next_normal();
        }
        if (!pos || !neg)
            continue;
        double cost = std::vector<double>{0.1, 1.0, 10.0}[trial % 3];
        KernelSpec spec = trial % 2 == 0 ? linear_kernel() : rbf_kernel(1.0);

        BinaryTraining t = train_binary(x, y, spec, cost, 1e-6);
        Matrix k = kernel_matrix(spec, x, x);
        auto oracle = solve_dual_exact(k, y, cost);
        REQUIRE(oracle.found);
        CHECK(std::abs(t.dual_objective - oracle.objective) <=
              1e-6 * (1.0 + std::abs(oracle.objective)));

        KktReport kkt = check_kkt(t, x, y);
        CHECK(kkt.pass(1e-3));

        // Prediction agreement on a probe grid, boundary cases excused.
        double gamma = spec.family == KernelFamily::rbf ? *spec.gamma : -1.0;
        Matrix probe(50, q);
        for (std::size_t i = 0; i < 50; ++i)
            for (std::size_t j = 0; j < q; ++j)
                probe(i, j) = 2.0 * rng.next_normal();
        auto [labels, values] = predict_binary(t.model, probe);
        bool all = true;
        for (std::size_t i = 0; i < 50; ++i) {
            double fo = oracle_decision(oracle, x, y, probe, i, gamma);
            int lo = fo < 0.0 ? -1 : 1;
            if (lo != labels[i] && std::min(std::abs(fo), std::abs(values[i])) > 1e-6)
                all = false;
        }
        agree += all;
        ++total;
    }
    CHECK(total >= 30);
    CHECK(agree == total);
}

TEST_CASE("permuting training rows does not change the decision function") {
    Rng rng(55);
    Matrix x(12, 2);
    std::vector<int> y(12);
    for (std::size_t i = 0; i < 12; ++i) {
        y[i] = i % 2 == 0 ? 1 : -1;
        for (std::size_t j = 0; j < 2; ++j)
            x(i, j) = rng.next_normal() + y[i];
    }
    BinaryTraining base = train_binary(x, y, rbf_kernel(0.5), 1.0, 1e-8);

    std::vector<std::size_t> perm{7, 2, 9, 0, 4, 11, 1, 8, 3, 10, 5, 6};
    Matrix xp = x.take_rows(perm);
    std::vector<int> yp(12);
    for (std::size_t i = 0; i < 12; ++i)
        yp[i] = y[perm[i]];
    BinaryTraining shuffled = train_binary(xp, yp, rbf_kernel(0.5), 1.0, 1e-8);

    Matrix probe(20, 2);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            probe(i, j) = rng.next_normal() * 2;
    auto [l1, v1] = predict_binary(base.model, probe);
    auto [l2, v2] = predict_binary(shuffled.model, probe);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(std::abs(v1[i] - v2[i]) < 1e-9);
        CHECK(l1[i] == l2[i]);
    }
}

TEST_CASE("dual feasibility holds for every fitted model") {
    Rng rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 4 + rng.next_below(10);
        Matrix x(n, 2);
        std::vector<int> y(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.next_unit() < 0.5 ? -1 : 1;
            (y[i] > 0 ? pos : neg) = true;
            x(i, 0) = rng.next_normal();
            x(i, 1) = rng.next_normal();
        }
        if (!pos || !neg)
            continue;
        BinaryTraining t = train_binary(x, y, rbf_kernel(1.0), 1.0);
        double balance = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            balance += t.full_alpha[i] * y[i];
            CHECK(t.full_alpha[i] >= 0.0);
            CHECK(t.full_alpha[i] <= 1.0);
        }
        CHECK(std::abs(balance) < 1e-8);
    }
}

TEST_CASE("one-against-one builds k(k-1)/2 binary models") {
    SynthResult s2 = synth_planted(20, 3, 2, 2, 1.5, 3);
    SvmModel m2 = train_multiclass(s2.data, rbf_kernel(1.0), 1.0);
    CHECK(m2.pairs.size() == 1);

    SynthResult s4 = synth_planted(24, 3, 2, 4, 1.5, 3);
    SvmModel m4 = train_multiclass(s4.data, rbf_kernel(1.0), 1.0);
    CHECK(m4.pairs.size() == 6);

    auto counts = s4.data.class_counts();
    for (const auto& pm : m4.pairs) {
        std::size_t expect = counts[static_cast<std::size_t>(pm.class_a)] +
                             counts[static_cast<std::size_t>(pm.class_b)];
        // Support vectors are a subset; training size shows via sv_indices.
        for (std::size_t idx : pm.svm.sv_indices)
            CHECK(idx < expect);
    }
}

TEST_CASE("binary multiclass predictions equal the relabeled binary model") {
    SynthResult s = synth_planted(30, 4, 2, 2, 2.0, 9);
    SvmModel model = train_multiclass(s.data, rbf_kernel(0.5), 1.0);

    std::vector<int> y;
    for (int label : s.data.labels)
        y.push_back(label == 0 ? 1 : -1);
    KernelSpec resolved = rbf_kernel(0.5);
    BinaryTraining t = train_binary(s.data.features, y, resolved, 1.0);

    auto multi = predict_multiclass(model, s.data.features);
    auto [bin, values] = predict_binary(t.model, s.data.features);
    for (std::size_t i = 0; i < multi.size(); ++i)
        CHECK(multi[i] == (bin[i] > 0 ? 0 : 1));
}

TEST_CASE("multiclass votes break ties toward the smallest class id") {
    // A cyclic vote: (0,1)->0, (1,2)->1, (0,2)->2 gives one vote each.
    SvmModel model;
    model.class_count = 3;
    model.pairs.push_back({0, 1, constant_vote(1.0)});   // votes class 0
    model.pairs.push_back({1, 2, constant_vote(1.0)});   // votes class 1
    model.pairs.push_back({0, 2, constant_vote(-1.0)});  // votes class 2
    auto pred = predict_multiclass(model, Matrix::from_rows({{0.5}}));
    CHECK(pred[0] == 0);

    // Unanimous vote wins outright.
    SvmModel unanimous;
    unanimous.class_count = 3;
    unanimous.pairs.push_back({0, 1, constant_vote(-1.0)}); // class 1
    unanimous.pairs.push_back({1, 2, constant_vote(1.0)});  // class 1
    unanimous.pairs.push_back({0, 2, constant_vote(-1.0)}); // class 2
    auto pred2 = predict_multiclass(unanimous, Matrix::from_rows({{0.5}}));
    CHECK(pred2[0] == 1);
}

TEST_CASE("apparent error rate is an exact fraction") {
    SynthResult s = synth_planted(20, 3, 3, 2, 3.0, 21);
    SvmModel model = train_multiclass(s.data, rbf_kernel(1.0), 10.0);
    Fraction apr = apparent_error_rate(model, s.data);
    CHECK(apr == Fraction::of(0, 20)); // strongly separated plant fits exactly
    CHECK(apr.value() == 0.0);

    // Majority-vote-only degenerate model on class counts {7, 8, 6}: always
    // predicting the biggest class misses the other 13 of 21.
    Matrix x(21, 1);
    std::vector<int> labels;
    for (std::size_t i = 0; i < 21; ++i) {
        x(i, 0) = static_cast<double>(i);
        labels.push_back(i < 7 ? 0 : (i < 15 ? 1 : 2));
    }
    Dataset d = tiny_dataset(x, labels, 3);

    SvmModel degenerate;
    degenerate.class_count = 3;
    degenerate.pairs.push_back({0, 1, constant_vote(-1.0)}); // class 1
    degenerate.pairs.push_back({1, 2, constant_vote(1.0)});  // class 1
    degenerate.pairs.push_back({0, 2, constant_vote(1.0)});  // class 0
    Fraction apr2 = apparent_error_rate(degenerate, d);
    CHECK(apr2 == Fraction::of(13, 21));

    // Exact threshold comparisons stay exact.
    CHECK(Fraction::of(6, 181) <= Fraction::of(6, 181));
    CHECK(Fraction::of(5, 181) < Fraction::of(6, 181));
    CHECK_FALSE(Fraction::of(7, 181) <= Fraction::of(6, 181));
}

TEST_CASE("model serialization round-trips bit-exact predictions") {
    SynthResult s = synth_planted(18, 5, 3, 3, 2.0, 77);
    SvmModel model = train_multiclass(s.data, rbf_kernel(0.8), 2.5);

    auto path = (std::filesystem::temp_directory_path() / "stepsvm_model.txt").string();
    save_model(model, path);
    SvmModel loaded = load_model(path);

    REQUIRE(loaded.pairs.size() == model.pairs.size());
    for (std::size_t p = 0; p < model.pairs.size(); ++p) {
        CHECK(loaded.pairs[p].svm.bias == model.pairs[p].svm.bias);
        CHECK(loaded.pairs[p].svm.alpha == model.pairs[p].svm.alpha);
        CHECK(loaded.pairs[p].svm.support_vectors == model.pairs[p].svm.support_vectors);
    }

    Matrix probe(10, 5);
    Rng rng(4);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            probe(i, j) = rng.next_normal();
    CHECK(predict_multiclass(model, probe) == predict_multiclass(loaded, probe));

    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model(path), io_error);
}
