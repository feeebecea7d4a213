#pragma once

// Dense direct solves for the handful of small systems in this project
// (normal equations up to 12x12, Riccati-sized 2x2 work in tests).

#include <cmath>
#include <vector>

#include "asmpc/error.hpp"

namespace asmpc {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// A is n*n row-major. Throws NumericError on (numerically) singular A.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b,
                                        std::size_t n) {
    if (a.size() != n * n || b.size() != n) throw ContractError("solve_linear: bad dimensions");
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        double best_abs = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[r * n + col]);
            if (v > best_abs) {
                best = r;
                best_abs = v;
            }
        }
        if (best_abs < 1e-300) throw NumericError("solve_linear: singular matrix");
        if (best != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[best * n + c]);
            std::swap(b[col], b[best]);
        }
        const double pivot = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / pivot;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

}  // namespace asmpc
