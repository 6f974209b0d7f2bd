#pragma once

#include <cstddef>

#include "kernels.hpp"

namespace mindiv::gram {

struct self_sums {
    double offdiag = 0.0; // sum over ordered pairs i != j
    double diag = 0.0;    // sum over i of k(x_i, x_i)
};

// Gram sums over one sample. Compiled with vectorized math; callers are
// responsible for overflow guards on unbounded kernels.
self_sums self(const kernel_spec& k, const double* x, std::size_t n);

// Sum of k(x_i, y_j) over all i, j.
double cross(const kernel_spec& k, const double* x, std::size_t n, const double* y,
             std::size_t m);

struct pair_moments {
    double sum = 0.0;    // sum over unordered pairs i < j
    double sum_sq = 0.0; // sum of squares over the same pairs
};

// Stein-kernel pair sums for a gaussian target with gaussian kernel.
pair_moments stein_gauss_pairs(double target_mean, double target_var, double bandwidth,
                               const double* x, std::size_t n);

} // namespace mindiv::gram
