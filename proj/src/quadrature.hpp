#pragma once

#include <cmath>
#include <concepts>

namespace mindiv {

// Tanh-sinh quadrature on a finite interval. Converges fast for smooth
// integrands and tolerates integrable endpoint singularities, which occur
// here with beta densities for shape parameters below one.
template <typename F>
    requires std::invocable<F, double>
double integrate(F&& f, double lo, double hi, double tol = 1e-12) {
    if (lo == hi) return 0.0;
    const double c = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double tmax = 3.8; // tanh(sinh(3.8)*pi/2) == 1 in double precision

    auto eval = [&](double t) -> double {
        const double u = 0.5 * M_PI * std::sinh(t);
        const double w = 0.5 * M_PI * std::cosh(t) / (std::cosh(u) * std::cosh(u));
        const double x = std::tanh(u);
        if (std::fabs(x) >= 1.0) return 0.0;
        const double v = f(mid + c * x);
        return std::isfinite(v) ? v * w : 0.0;
    };

    double h = 1.0;
    double sum = eval(0.0);
    for (double t = h; t <= tmax; t += h) sum += eval(t) + eval(-t);
    double result = c * h * sum;

    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2.0 * h) add += eval(t) + eval(-t);
        sum += add;
        const double next = c * h * sum;
        if (level >= 3 && std::fabs(next - result) <= tol * (1.0 + std::fabs(next))) {
            return next;
        }
        result = next;
    }
    return result;
}

// Semi-infinite integral over [a, inf) via the x = a + t/(1-t) map.
template <typename F>
    requires std::invocable<F, double>
double integrate_right_tail(F&& f, double a, double tol = 1e-12) {
    return integrate(
        [&, a](double t) {
            const double om = 1.0 - t;
            const double x = a + t / om;
            return f(x) / (om * om);
        },
        0.0, 1.0, tol);
}

} // namespace mindiv
