#pragma once

#include <cstddef>
#include <span>

namespace gpide {

/// Pairwise (tree) summation with a fixed association order.
///
/// Every summation that feeds a reported number goes through this helper so
/// results are bit-reproducible across runs, worker counts, and refactorings
/// of the call sites.  The base block is summed left to right; blocks are
/// combined by recursive halving.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace gpide
