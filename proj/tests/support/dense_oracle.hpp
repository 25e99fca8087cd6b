#pragma once

// Reference dense linear solver used to cross-check the production rating
// path. Deliberately self-contained: plain nested vectors, Gaussian
// elimination with partial pivoting, no Eigen, so the two routes share no
// code.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace egorank::testsupport {

inline std::vector<double> solve_dense_gepp(std::vector<std::vector<double>> a,
                                            std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n)
        throw std::invalid_argument("matrix/vector size mismatch");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("singular matrix in reference solver");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);

        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a[row][col] / a[col][col];
            if (factor == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

} // namespace egorank::testsupport
