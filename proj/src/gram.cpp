#include "gram.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "parallel.hpp"

// This translation unit is compiled with vectorization-friendly math flags;
// the row loops below are the dominant cost of every quadratic estimator.

namespace mindiv::gram {

namespace {

constexpr std::size_t kRowBlock = 256;

// Sum of k(x_i, x_j) for j in [i+1, n) plus cross/self row sums, dispatched
// per family so the inner loop is a single vectorizable expression.
template <typename F>
double pair_block_sum(const double* x, std::size_t n, std::size_t row_lo, std::size_t row_hi,
                      F&& kf) {
    double acc = 0.0;
    for (std::size_t i = row_lo; i < row_hi; ++i) {
        const double xi = x[i];
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) row += kf(xi, x[j]);
        acc += row;
    }
    return acc;
}

template <typename F>
double blocked_pair_sum(const double* x, std::size_t n, F&& kf) {
    const std::size_t n_blocks = (n + kRowBlock - 1) / kRowBlock;
    std::vector<double> partial(n_blocks, 0.0);
    parallel_for_blocks(n_blocks, [&](std::size_t b) {
        const std::size_t lo = b * kRowBlock;
        const std::size_t hi = std::min(n, lo + kRowBlock);
        partial[b] = pair_block_sum(x, n, lo, hi, kf);
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

template <typename F>
double blocked_cross_sum(const double* x, std::size_t n, const double* y, std::size_t m, F&& kf) {
    const std::size_t n_blocks = (n + kRowBlock - 1) / kRowBlock;
    std::vector<double> partial(n_blocks, 0.0);
    parallel_for_blocks(n_blocks, [&](std::size_t b) {
        const std::size_t lo = b * kRowBlock;
        const std::size_t hi = std::min(n, lo + kRowBlock);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double xi = x[i];
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += kf(xi, y[j]);
            acc += row;
        }
        partial[b] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

template <typename F>
self_sums self_dispatch(const double* x, std::size_t n, F&& kf) {
    self_sums out;
    out.offdiag = 2.0 * blocked_pair_sum(x, n, kf);
    for (std::size_t i = 0; i < n; ++i) out.diag += kf(x[i], x[i]);
    return out;
}

} // namespace

self_sums self(const kernel_spec& k, const double* x, std::size_t n) {
    switch (k.family) {
        case kernel_family::gaussian: {
            const double inv = 1.0 / (2.0 * k.c * k.c);
            return self_dispatch(x, n, [inv](double a, double b) {
                const double d = a - b;
                return std::exp(-d * d * inv);
            });
        }
        case kernel_family::laplacian: {
            const double lam = k.lambda;
            return self_dispatch(x, n, [lam](double a, double b) {
                return std::exp(-lam * std::fabs(a - b));
            });
        }
        case kernel_family::exponential: {
            const double bb = k.b;
            return self_dispatch(x, n,
                                 [bb](double a, double b) { return std::exp(bb * a * b); });
        }
        case kernel_family::gaussian_exponentiated: {
            const double aa = k.a, bb = k.b;
            return self_dispatch(x, n, [aa, bb](double a, double b) {
                const double d = a - b;
                return std::exp(-aa * d * d + bb * a * b);
            });
        }
        case kernel_family::matern:
            return self_dispatch(x, n,
                                 [&k](double a, double b) { return kernel_eval(k, a, b); });
    }
    return {};
}

double cross(const kernel_spec& k, const double* x, std::size_t n, const double* y,
             std::size_t m) {
    switch (k.family) {
        case kernel_family::gaussian: {
            const double inv = 1.0 / (2.0 * k.c * k.c);
            return blocked_cross_sum(x, n, y, m, [inv](double a, double b) {
                const double d = a - b;
                return std::exp(-d * d * inv);
            });
        }
        case kernel_family::laplacian: {
            const double lam = k.lambda;
            return blocked_cross_sum(x, n, y, m, [lam](double a, double b) {
                return std::exp(-lam * std::fabs(a - b));
            });
        }
        case kernel_family::exponential: {
            const double bb = k.b;
            return blocked_cross_sum(x, n, y, m,
                                     [bb](double a, double b) { return std::exp(bb * a * b); });
        }
        case kernel_family::gaussian_exponentiated: {
            const double aa = k.a, bb = k.b;
            return blocked_cross_sum(x, n, y, m, [aa, bb](double a, double b) {
                const double d = a - b;
                return std::exp(-aa * d * d + bb * a * b);
            });
        }
        case kernel_family::matern:
            return blocked_cross_sum(
                x, n, y, m, [&k](double a, double b) { return kernel_eval(k, a, b); });
    }
    return 0.0;
}

pair_moments stein_gauss_pairs(double target_mean, double target_var, double bandwidth,
                               const double* x, std::size_t n) {
    const double m = target_mean;
    const double s2 = target_var;
    const double c2 = bandwidth * bandwidth;
    const double inv2c2 = 1.0 / (2.0 * c2);
    const double mix = (s2 + c2) / (s2 * c2 * c2);
    const double s4 = s2 * s2;

    const std::size_t n_blocks = (n + kRowBlock - 1) / kRowBlock;
    std::vector<pair_moments> partial(n_blocks);
    parallel_for_blocks(n_blocks, [&](std::size_t blk) {
        const std::size_t lo = blk * kRowBlock;
        const std::size_t hi = std::min(n, lo + kRowBlock);
        pair_moments acc;
        for (std::size_t i = lo; i < hi; ++i) {
            const double xi = x[i];
            double row = 0.0, row_sq = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = xi - x[j];
                const double h = ((xi - m) * (x[j] - m) / s4 - d * d * mix + 1.0 / c2) *
                                 std::exp(-d * d * inv2c2);
                row += h;
                row_sq += h * h;
            }
            acc.sum += row;
            acc.sum_sq += row_sq;
        }
        partial[blk] = acc;
    });
    pair_moments out;
    for (const auto& p : partial) {
        out.sum += p.sum;
        out.sum_sq += p.sum_sq;
    }
    return out;
}

} // namespace mindiv::gram
