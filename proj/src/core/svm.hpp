#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/fraction.hpp"
#include "core/kernel.hpp"
#include "core/matrix.hpp"

namespace stepsvm {

// Fitted binary soft-margin SVM. Only support vectors (alpha > 0) are kept;
// the decision value is f(x) = sum_i alpha_i y_i K(sv_i, x) + bias.
struct BinarySvm {
    Matrix support_vectors;              // one row per support vector
    std::vector<double> alpha;           // 0 < alpha_i <= cost
    std::vector<int> sv_labels;          // +1 / -1
    std::vector<std::size_t> sv_indices; // positions in the training matrix
    double bias = 0.0;
    KernelSpec spec;                     // gamma resolved
    double cost = 1.0;
    std::size_t iterations = 0;          // pair updates spent
    double kkt_violation = 0.0;          // final max violation

    double decision_value(std::span<const double> x) const;
};

struct BinaryTraining {
    BinarySvm model;
    std::vector<double> full_alpha; // dual coefficient per training point
    double dual_objective = 0.0;
};

// Thrown when the iteration cap is reached; carries the best iterate.
class smo_nonconvergence : public solver_error {
public:
    smo_nonconvergence(const std::string& msg, BinaryTraining best)
        : solver_error(msg), best_(std::make_shared<BinaryTraining>(std::move(best))) {}
    const BinaryTraining& best() const { return *best_; }

private:
    std::shared_ptr<BinaryTraining> best_;
};

// Trains on X (one sample per row) with labels y in {-1,+1} by pairwise
// working-set ascent on the dual. Stops once the maximum KKT violation is
// below an internal threshold chosen so that (a) every training point meets
// the KKT conditions within tol and (b) on positive semi-definite kernels
// the dual objective is within tol*(1+|objective|) of the optimum. An unset
// spec.gamma is resolved from X.
BinaryTraining train_binary(const Matrix& X, const std::vector<int>& y, KernelSpec spec,
                            double cost, double tol = 1e-3);

// Labels are the sign of the decision value; an exact zero maps to +1.
std::pair<std::vector<int>, std::vector<double>> predict_binary(const BinarySvm& model,
                                                                const Matrix& X);

// Post-training KKT audit over the full training set, using decision values
// recomputed from the stored support vectors.
struct KktReport {
    double max_violation = 0.0; // worst of the three condition groups
    double alpha_y_sum = 0.0;   // |sum alpha_i y_i|
    bool pass(double tol) const { return max_violation <= tol && alpha_y_sum < 1e-8; }
};
KktReport check_kkt(const BinaryTraining& t, const Matrix& X, const std::vector<int>& y);

// One-against-one multiclass model: one binary SVM per unordered class pair
// (a, b), a < b, trained with +1 for class a.
struct PairwiseModel {
    int class_a = 0;
    int class_b = 1;
    BinarySvm svm;
};

struct SvmModel {
    std::size_t class_count = 0;
    std::vector<PairwiseModel> pairs; // lexicographic (a, b) order
};

// gamma (when unset) is resolved once from the full training matrix so all
// pairwise models share the same kernel scale.
SvmModel train_multiclass(const Dataset& d, const KernelSpec& spec, double cost,
                          double tol = 1e-3);

// Each pair casts one vote; the highest vote count wins, ties going to the
// smallest class id.
std::vector<int> predict_multiclass(const SvmModel& model, const Matrix& X);

// Resubstitution error: misclassified training samples over n, exact.
Fraction apparent_error_rate(const SvmModel& model, const Dataset& train);

// Versioned text serialization, round-tripping every field at full precision.
void save_model(const SvmModel& model, const std::string& path);
SvmModel load_model(const std::string& path);

} // namespace stepsvm
