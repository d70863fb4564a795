#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace poclab {

// Pairwise (binary tree) summation over an index range. The reduction order
// depends only on [lo, hi), never on thread count, so every sum computed
// through here is bit-reproducible.
template <typename F>
double pairwise_sum(std::size_t lo, std::size_t hi, F&& term) {
    const std::size_t n = hi - lo;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = term(lo);
        for (std::size_t i = lo + 1; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline double pairwise_sum(std::span<const double> values) {
    return pairwise_sum(std::size_t{0}, values.size(),
                        [&](std::size_t i) { return values[i]; });
}

}  // namespace poclab
