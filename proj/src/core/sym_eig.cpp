#include "core/sym_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace stepsvm {

void sym_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors) {
    if (a.rows() != a.cols())
        throw validation_error("sym_eigen: matrix not square");
    std::size_t n = a.rows();
    Matrix m = a;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i)
        v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            scale = std::max(scale, std::abs(m(i, j)));
    double stop = scale > 0.0 ? scale * 1e-15 : 0.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off = std::max(off, std::abs(m(i, j)));
        if (off <= stop)
            break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = m(p, q);
                if (std::abs(apq) <= stop)
                    continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t = std::copysign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return m(x, x) > m(y, y); });

    values.resize(n);
    vectors = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        values[r] = m(order[r], order[r]);
        for (std::size_t k = 0; k < n; ++k)
            vectors(r, k) = v(k, order[r]);
    }
}

} // namespace stepsvm
