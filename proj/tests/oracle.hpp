#pragma once

// Independent reference implementations used to verify the library. These
// deliberately avoid the library's own numeric machinery: integration is
// adaptive Gauss-Kronrod here versus tanh-sinh in the core, and the
// estimator references are direct textbook summations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
namespace gk {
inline constexpr double nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double wg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                 0.417959183673469, 0.381830050505119, 0.279705391489277,
                                 0.129484966168870};
} // namespace gk

inline void gk15(const std::function<double(double)>& f, double a, double b, double* result,
                 double* err) {
    const double c = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc_k = 0.0, acc_g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(mid + c * gk::nodes[i]);
        acc_k += gk::wk[i] * v;
        if (i % 2 == 1) acc_g += gk::wg[i / 2] * v;
    }
    *result = acc_k * c;
    *err = std::fabs((acc_k - acc_g) * c);
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-10, int depth = 0) {
    double whole, err;
    gk15(f, a, b, &whole, &err);
    if (err <= tol || depth >= 28) return whole;
    const double mid = 0.5 * (a + b);
    return integrate_adaptive(f, a, mid, tol * 0.5, depth + 1) +
           integrate_adaptive(f, mid, b, tol * 0.5, depth + 1);
}

// Integral of y^a (1-y)^b g(y) over [lo, hi] inside [0,1], with square-root
// substitutions at singular endpoints (a < 0 or b < 0).
inline double integrate_beta_weighted(double a, double b,
                                      const std::function<double(double)>& g, double lo,
                                      double hi, double tol = 1e-11) {
    if (lo >= hi) return 0.0;
    // Split at 1/2 and substitute y = t^2 near 0 and 1 - y = t^2 near 1 so
    // the transformed integrands are bounded.
    double total = 0.0;
    const double mid = std::min(std::max(0.5, lo), hi);
    if (lo < mid) {
        auto left = [&](double t) {
            const double y = t * t;
            return 2.0 * std::pow(t, 2.0 * a + 1.0) * std::pow(1.0 - y, b) * g(y);
        };
        total += integrate_adaptive(left, std::sqrt(lo), std::sqrt(mid), tol);
    }
    if (mid < hi) {
        auto right = [&](double t) {
            const double y = 1.0 - t * t;
            return 2.0 * std::pow(y, a) * std::pow(t, 2.0 * b + 1.0) * g(y);
        };
        total += integrate_adaptive(right, std::sqrt(1.0 - hi), std::sqrt(1.0 - mid), tol);
    }
    return total;
}

// Direct double-sum references for the kernel estimators.
inline double mmd2_u_reference(const std::function<double(double, double)>& k,
                               const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    const double m = static_cast<double>(ys.size());
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (i != j) t1 += k(xs[i], xs[j]);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (i != j) t2 += k(ys[i], ys[j]);
    for (double x : xs)
        for (double y : ys) t3 += k(x, y);
    return t1 / (n * (n - 1.0)) + t2 / (m * (m - 1.0)) - 2.0 * t3 / (n * m);
}

inline double mmd2_v_reference(const std::function<double(double, double)>& k,
                               const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    const double m = static_cast<double>(ys.size());
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    for (double a : xs)
        for (double b : xs) t1 += k(a, b);
    for (double a : ys)
        for (double b : ys) t2 += k(a, b);
    for (double x : xs)
        for (double y : ys) t3 += k(x, y);
    return t1 / (n * n) + t2 / (m * m) - 2.0 * t3 / (n * m);
}

// Minimum-cost coupling by explicit enumeration of permutations.
inline double wasserstein_bruteforce(std::vector<double> xs, std::vector<double> ys, double p) {
    std::sort(ys.begin(), ys.end());
    std::vector<std::size_t> perm(ys.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            cost += std::pow(std::fabs(xs[i] - ys[perm[i]]), p);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(xs.size()), 1.0 / p);
}

// Central finite difference of a scalar function.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double quartile_range(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < v.size() ? v[lo] * (1.0 - frac) + v[lo + 1] * frac : v[lo];
    };
    return at(0.75) - at(0.25);
}

} // namespace oracle
