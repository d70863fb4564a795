#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace poclab {

// Eigenvalues of a symmetric n x n matrix by cyclic Jacobi rotations.
// Destroys nothing; adequate for the small matrices used in tests and
// operator-norm evaluations.
inline std::vector<double> symmetric_eigenvalues(std::span<const double> a_in, int n) {
    std::vector<double> a(a_in.begin(), a_in.end());
    auto off = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return s;
    };
    double scale = 0.0;
    for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
    const double tol = 1e-30 * std::max(1.0, scale * scale);
    for (int sweep = 0; sweep < 100 && off() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * n + p], aqq = a[q * n + q];
                const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(phi), s = std::sin(phi);
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
    return ev;
}

}  // namespace poclab
