#include "targets.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace mindiv {

using special::norm_cdf;

target_spec target_spec::gaussian(double m, double sigma) {
    target_spec t;
    t.family = target_family::gaussian;
    t.m = m;
    t.sigma = sigma;
    t.validate();
    return t;
}

target_spec target_spec::generalized_normal(double alpha, double beta, double gamma) {
    target_spec t;
    t.family = target_family::generalized_normal;
    t.alpha = alpha;
    t.beta = beta;
    t.gamma = gamma;
    t.validate();
    return t;
}

target_spec target_spec::skew_gaussian(double s, double m, double v) {
    target_spec t;
    t.family = target_family::skew_gaussian;
    t.s = s;
    t.m = m;
    t.v = v;
    t.validate();
    return t;
}

target_spec target_spec::beta_dist(double alpha, double beta) {
    target_spec t;
    t.family = target_family::beta;
    t.alpha = alpha;
    t.beta = beta;
    t.validate();
    return t;
}

target_spec target_spec::uniform() {
    target_spec t;
    t.family = target_family::uniform;
    return t;
}

void target_spec::validate() const {
    switch (family) {
        case target_family::gaussian:
            require(sigma > 0.0, errc::invalid_argument, "gaussian target needs sigma > 0");
            break;
        case target_family::generalized_normal:
            require(beta > 0.0 && gamma > 0.0, errc::invalid_argument,
                    "generalized normal target needs beta > 0 and gamma > 0");
            break;
        case target_family::skew_gaussian:
            require(v > 0.0, errc::invalid_argument, "skew gaussian target needs v > 0");
            break;
        case target_family::beta:
            require(alpha > 0.0 && beta > 0.0, errc::invalid_argument,
                    "beta target needs alpha > 0 and beta > 0");
            break;
        case target_family::uniform: break;
    }
}

std::string target_spec::describe() const {
    std::ostringstream os;
    switch (family) {
        case target_family::gaussian: os << "gaussian{m=" << m << ", sigma=" << sigma << "}"; break;
        case target_family::generalized_normal:
            os << "generalized_normal{alpha=" << alpha << ", beta=" << beta << ", gamma=" << gamma
               << "}";
            break;
        case target_family::skew_gaussian:
            os << "skew_gaussian{s=" << s << ", m=" << m << ", v=" << v << "}";
            break;
        case target_family::beta: os << "beta{alpha=" << alpha << ", beta=" << beta << "}"; break;
        case target_family::uniform: os << "uniform{}"; break;
    }
    return os.str();
}

double log_pdf(const target_spec& t, double x) {
    switch (t.family) {
        case target_family::gaussian: {
            const double z = (x - t.m) / t.sigma;
            return -0.5 * z * z - std::log(t.sigma) - 0.5 * std::log(2.0 * M_PI);
        }
        case target_family::generalized_normal: {
            const double lognorm = -std::log(2.0) * (t.gamma + 1.0) / t.gamma + std::log(t.gamma) -
                                   std::log(t.beta) - std::lgamma(1.0 / t.gamma);
            return lognorm - 0.5 * std::pow(std::fabs(x - t.alpha) / t.beta, t.gamma);
        }
        case target_family::skew_gaussian: {
            const double z = (x - t.m) / std::sqrt(t.v);
            return std::log(2.0) - 0.5 * z * z - 0.5 * std::log(2.0 * M_PI * t.v) +
                   std::log(norm_cdf(t.s * z));
        }
        case target_family::beta: {
            if (x < 0.0 || x > 1.0) return -std::numeric_limits<double>::infinity();
            return (t.alpha - 1.0) * std::log(x) + (t.beta - 1.0) * std::log1p(-x) -
                   special::log_beta(t.alpha, t.beta);
        }
        case target_family::uniform:
            return (x >= 0.0 && x <= 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    fail(errc::internal, "unreachable target family");
}

double pdf(const target_spec& t, double x) {
    if (t.bounded_support() && (x < 0.0 || x > 1.0)) return 0.0;
    return std::exp(log_pdf(t, x));
}

double score(const target_spec& t, double x) {
    switch (t.family) {
        case target_family::gaussian: return -(x - t.m) / (t.sigma * t.sigma);
        case target_family::generalized_normal: {
            const double d = x - t.alpha;
            if (d == 0.0) {
                if (t.gamma > 1.0) return 0.0;
                fail(errc::out_of_support,
                     "generalized normal score is undefined at the location for gamma <= 1");
            }
            const double sgn = d > 0.0 ? 1.0 : -1.0;
            return -t.gamma * std::pow(std::fabs(d), t.gamma - 1.0) * sgn /
                   (2.0 * std::pow(t.beta, t.gamma));
        }
        case target_family::skew_gaussian: {
            const double rv = std::sqrt(t.v);
            const double z = (x - t.m) / rv;
            return -z / rv + (t.s / rv) * special::inverse_mills(t.s * z);
        }
        case target_family::beta: {
            require(x > 0.0 && x < 1.0, errc::out_of_support,
                    "beta score needs x inside (0,1)");
            return (t.alpha - 1.0) / x + (t.beta - 1.0) / (x - 1.0);
        }
        case target_family::uniform:
            require(x > 0.0 && x < 1.0, errc::out_of_support,
                    "uniform score needs x inside (0,1)");
            return 0.0;
    }
    fail(errc::internal, "unreachable target family");
}

moment_set moments(const target_spec& t) {
    moment_set mm;
    switch (t.family) {
        case target_family::gaussian:
            mm.mean = t.m;
            mm.variance = t.sigma * t.sigma;
            break;
        case target_family::generalized_normal: {
            const double g1 = std::exp(std::lgamma(1.0 / t.gamma));
            const double g3 = std::exp(std::lgamma(3.0 / t.gamma));
            const double g5 = std::exp(std::lgamma(5.0 / t.gamma));
            mm.mean = t.alpha;
            mm.variance = t.beta * t.beta * std::pow(4.0, 1.0 / t.gamma) * g3 / g1;
            mm.skewness = 0.0;
            mm.excess_kurtosis = g5 * g1 / (g3 * g3) - 3.0;
            break;
        }
        case target_family::skew_gaussian: {
            const double delta = t.s / std::sqrt(1.0 + t.s * t.s);
            const double d2pi = 2.0 * delta * delta / M_PI;
            const double dsq = delta * std::sqrt(2.0 / M_PI);
            mm.mean = t.m + delta * std::sqrt(2.0 * t.v / M_PI);
            mm.variance = t.v * (1.0 - d2pi);
            mm.skewness =
                0.5 * (4.0 - M_PI) * dsq * dsq * dsq / std::pow(1.0 - d2pi, 1.5);
            mm.excess_kurtosis =
                2.0 * (M_PI - 3.0) * dsq * dsq * dsq * dsq / ((1.0 - d2pi) * (1.0 - d2pi));
            break;
        }
        case target_family::beta: {
            const double a = t.alpha, b = t.beta;
            const double ab = a + b;
            mm.mean = a / ab;
            mm.variance = a * b / (ab * ab * (ab + 1.0));
            mm.skewness = 2.0 * (b - a) * std::sqrt(ab + 1.0) / ((ab + 2.0) * std::sqrt(a * b));
            mm.excess_kurtosis = 6.0 * ((b - a) * (b - a) * (ab + 1.0) - a * b * (ab + 2.0)) /
                                 (a * b * (ab + 2.0) * (ab + 3.0));
            break;
        }
        case target_family::uniform:
            mm.mean = 0.5;
            mm.variance = 1.0 / 12.0;
            mm.skewness = 0.0;
            mm.excess_kurtosis = -1.2;
            break;
    }
    return mm;
}

double cdf(const target_spec& t, double x) {
    switch (t.family) {
        case target_family::gaussian: return norm_cdf((x - t.m) / t.sigma);
        case target_family::generalized_normal: {
            const double d = x - t.alpha;
            if (d == 0.0) return 0.5;
            const double u = 0.5 * std::pow(std::fabs(d) / t.beta, t.gamma);
            const double half = 0.5 * special::gamma_p(1.0 / t.gamma, u);
            return d > 0.0 ? 0.5 + half : 0.5 - half;
        }
        case target_family::skew_gaussian: {
            const double z = (x - t.m) / std::sqrt(t.v);
            return norm_cdf(z) - 2.0 * special::owens_t(z, t.s);
        }
        case target_family::beta: {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return special::ibeta_reg(t.alpha, t.beta, x);
        }
        case target_family::uniform: return std::min(1.0, std::max(0.0, x));
    }
    fail(errc::internal, "unreachable target family");
}

namespace {

// Bisection with Newton acceleration on a smooth strictly increasing cdf.
double invert_cdf(const target_spec& t, double u, double lo, double hi) {
    double step = std::max(1.0, hi - lo);
    while (cdf(t, lo) > u) {
        lo -= step;
        step *= 2.0;
    }
    step = std::max(1.0, hi - lo);
    while (cdf(t, hi) < u) {
        hi += step;
        step *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = cdf(t, x) - u;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double dens = pdf(t, x);
        double next = x;
        if (dens > 0.0) next = x - f / dens;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-12 * (1.0 + std::fabs(next))) return next;
        x = next;
    }
    return x;
}

} // namespace

double inverse_cdf(const target_spec& t, double u) {
    require(u > 0.0 && u < 1.0, errc::domain_error, "inverse_cdf needs u in (0,1)");
    switch (t.family) {
        case target_family::gaussian: return t.m + t.sigma * special::norm_quantile(u);
        case target_family::uniform: return u;
        case target_family::beta: return invert_cdf(t, u, 0.0, 1.0);
        case target_family::generalized_normal: {
            const double spread = t.beta * std::pow(2.0 * 40.0, 1.0 / t.gamma);
            return invert_cdf(t, u, t.alpha - spread, t.alpha + spread);
        }
        case target_family::skew_gaussian: {
            const double spread = 10.0 * std::sqrt(t.v);
            return invert_cdf(t, u, t.m - spread, t.m + spread);
        }
    }
    fail(errc::internal, "unreachable target family");
}

std::vector<double> sample(const target_spec& t, std::size_t n, std::uint64_t seed) {
    require(n >= 1, errc::invalid_argument, "sample needs n >= 1");
    rng g(seed);
    std::vector<double> out(n);
    switch (t.family) {
        case target_family::gaussian:
            for (auto& x : out) x = t.m + t.sigma * g.normal();
            break;
        case target_family::generalized_normal:
            // X = alpha + beta (2G)^{1/gamma} S with G ~ Gamma(1/gamma, 1).
            for (auto& x : out) {
                const double gdraw = g.gamma(1.0 / t.gamma);
                x = t.alpha + t.beta * std::pow(2.0 * gdraw, 1.0 / t.gamma) * g.rademacher();
            }
            break;
        case target_family::skew_gaussian: {
            const double delta = t.s / std::sqrt(1.0 + t.s * t.s);
            const double rv = std::sqrt(t.v);
            const double comp = std::sqrt(1.0 - delta * delta);
            for (auto& x : out) {
                const double z1 = g.normal();
                const double z2 = g.normal();
                x = t.m + rv * (delta * std::fabs(z1) + comp * z2);
            }
            break;
        }
        case target_family::beta:
            for (auto& x : out) x = g.beta(t.alpha, t.beta);
            break;
        case target_family::uniform:
            for (auto& x : out) x = g.uniform01();
            break;
    }
    return out;
}

target_spec beta_from_moments(double mean, double variance) {
    require(mean > 0.0 && mean < 1.0, errc::infeasible, "beta moment match needs mean in (0,1)");
    require(variance > 0.0, errc::infeasible, "beta moment match needs variance > 0");
    const double bound = mean * (1.0 - mean);
    require(variance < bound, errc::infeasible,
            "beta moment match needs variance < mean(1-mean)");
    const double nu = bound / variance - 1.0;
    return target_spec::beta_dist(mean * nu, (1.0 - mean) * nu);
}

target_spec with_moments(const target_spec& shape, double mean, double stddev) {
    require(stddev > 0.0, errc::invalid_argument, "with_moments needs stddev > 0");
    switch (shape.family) {
        case target_family::gaussian: return target_spec::gaussian(mean, stddev);
        case target_family::generalized_normal: {
            const double g1 = std::exp(std::lgamma(1.0 / shape.gamma));
            const double g3 = std::exp(std::lgamma(3.0 / shape.gamma));
            const double unit_var = std::pow(4.0, 1.0 / shape.gamma) * g3 / g1;
            return target_spec::generalized_normal(mean, stddev / std::sqrt(unit_var),
                                                   shape.gamma);
        }
        case target_family::skew_gaussian: {
            const double delta = shape.s / std::sqrt(1.0 + shape.s * shape.s);
            const double d2pi = 2.0 * delta * delta / M_PI;
            const double v = stddev * stddev / (1.0 - d2pi);
            const double m = mean - delta * std::sqrt(2.0 * v / M_PI);
            return target_spec::skew_gaussian(shape.s, m, v);
        }
        case target_family::beta: return beta_from_moments(mean, stddev * stddev);
        case target_family::uniform:
            fail(errc::invalid_argument, "uniform target has fixed moments");
    }
    fail(errc::internal, "unreachable target family");
}

} // namespace mindiv
