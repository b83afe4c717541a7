#pragma once

#include <vector>

#include "core/matrix.hpp"

namespace stepsvm {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues come
// back descending; row i of `vectors` is the unit eigenvector for values[i].
// Deterministic: fixed sweep order, no pivot randomization.
void sym_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors);

} // namespace stepsvm
