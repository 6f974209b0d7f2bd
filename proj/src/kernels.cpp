#include "kernels.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace mindiv {

kernel_spec kernel_spec::gaussian_exponentiated(double a, double b) {
    kernel_spec k;
    k.family = kernel_family::gaussian_exponentiated;
    k.a = a;
    k.b = b;
    k.validate();
    return k;
}

kernel_spec kernel_spec::matern(double sigma0, double sigma, int p) {
    kernel_spec k;
    k.family = kernel_family::matern;
    k.sigma0 = sigma0;
    k.sigma = sigma;
    k.p = p;
    k.validate();
    return k;
}

kernel_spec kernel_spec::gaussian(double c) {
    kernel_spec k;
    k.family = kernel_family::gaussian;
    k.c = c;
    k.validate();
    return k;
}

kernel_spec kernel_spec::laplacian(double lambda) {
    kernel_spec k;
    k.family = kernel_family::laplacian;
    k.lambda = lambda;
    k.validate();
    return k;
}

kernel_spec kernel_spec::exponential(double b) {
    kernel_spec k;
    k.family = kernel_family::exponential;
    k.b = b;
    k.validate();
    return k;
}

void kernel_spec::validate() const {
    switch (family) {
        case kernel_family::gaussian_exponentiated:
            require(a >= 0.0 && b >= 0.0, errc::invalid_argument,
                    "gaussian-exponentiated kernel needs a >= 0 and b >= 0");
            break;
        case kernel_family::matern:
            require(sigma0 > 0.0 && sigma > 0.0 && p >= 0, errc::invalid_argument,
                    "matern kernel needs sigma0 > 0, sigma > 0, p >= 0");
            break;
        case kernel_family::gaussian:
            require(c > 0.0, errc::invalid_argument, "gaussian kernel needs c > 0");
            break;
        case kernel_family::laplacian:
            require(lambda > 0.0, errc::invalid_argument, "laplacian kernel needs lambda > 0");
            break;
        case kernel_family::exponential:
            require(b > 0.0, errc::invalid_argument, "exponential kernel needs b > 0");
            break;
    }
}

std::string kernel_spec::describe() const {
    std::ostringstream os;
    switch (family) {
        case kernel_family::gaussian_exponentiated:
            os << "gaussian_exponentiated{a=" << a << ", b=" << b << "}";
            break;
        case kernel_family::matern:
            os << "matern{sigma0=" << sigma0 << ", sigma=" << sigma << ", p=" << p << "}";
            break;
        case kernel_family::gaussian: os << "gaussian{c=" << c << "}"; break;
        case kernel_family::laplacian: os << "laplacian{lambda=" << lambda << "}"; break;
        case kernel_family::exponential: os << "exponential{b=" << b << "}"; break;
    }
    return os.str();
}

namespace {

// Sum of the half-integer Matern polynomial factor at scaled distance.
// Exact factorial arithmetic holds up to p = 9 ((2p)! < 2^63); larger p
// switches to log-space coefficients.
double matern_value(const kernel_spec& k, double dist) {
    const double root = std::sqrt(2.0 * k.p + 1.0);
    const double r = root * dist / k.sigma;
    if (k.p == 0) return k.sigma0 * k.sigma0 * std::exp(-r);
    if (k.p < 10) {
        double poly = 0.0;
        double fact_p = 1.0;
        for (int i = 2; i <= k.p; ++i) fact_p *= i;
        double fact_2p = fact_p;
        for (int i = k.p + 1; i <= 2 * k.p; ++i) fact_2p *= i;
        for (int i = 0; i <= k.p; ++i) {
            double coef = 1.0; // (p+i)! / (i! (p-i)!)
            for (int j = i + 1; j <= k.p + i; ++j) coef *= j;
            double fact_pi = 1.0;
            for (int j = 2; j <= k.p - i; ++j) fact_pi *= j;
            coef /= fact_pi;
            poly += coef * std::pow(2.0 * r, k.p - i);
        }
        return k.sigma0 * k.sigma0 * std::exp(-r) * fact_p / fact_2p * poly;
    }
    const double log_front = std::lgamma(k.p + 1.0) - std::lgamma(2.0 * k.p + 1.0);
    double sum = 0.0;
    for (int i = 0; i <= k.p; ++i) {
        const double log_coef = std::lgamma(k.p + i + 1.0) - std::lgamma(i + 1.0) -
                                std::lgamma(k.p - i + 1.0);
        const double log_pow = (k.p - i) * std::log(2.0 * r);
        if (k.p - i == 0) {
            sum += std::exp(log_front + log_coef - r);
        } else if (r > 0.0) {
            sum += std::exp(log_front + log_coef + log_pow - r);
        }
    }
    return k.sigma0 * k.sigma0 * sum;
}

} // namespace

double kernel_eval(const kernel_spec& k, double x, double y) {
    switch (k.family) {
        case kernel_family::gaussian_exponentiated: {
            const double d = x - y;
            return std::exp(-k.a * d * d + k.b * x * y);
        }
        case kernel_family::matern: return matern_value(k, std::fabs(x - y));
        case kernel_family::gaussian: {
            const double d = x - y;
            return std::exp(-d * d / (2.0 * k.c * k.c));
        }
        case kernel_family::laplacian: return std::exp(-k.lambda * std::fabs(x - y));
        case kernel_family::exponential: return std::exp(k.b * x * y);
    }
    fail(errc::internal, "unreachable kernel family");
}

double kernel_dx(const kernel_spec& k, double x, double y) {
    switch (k.family) {
        case kernel_family::gaussian: {
            const double d = x - y;
            return std::exp(-d * d / (2.0 * k.c * k.c)) * (-d / (k.c * k.c));
        }
        case kernel_family::laplacian: {
            const double d = x - y;
            const double sgn = (d > 0.0) - (d < 0.0);
            return std::exp(-k.lambda * std::fabs(d)) * (-k.lambda * sgn);
        }
        default:
            fail(errc::unsupported_kernel,
                 "kernel_dx is defined for the gaussian and laplacian families only");
    }
}

double kernel_dxdy(const kernel_spec& k, double x, double y) {
    switch (k.family) {
        case kernel_family::gaussian: {
            const double d = x - y;
            const double c2 = k.c * k.c;
            return std::exp(-d * d / (2.0 * c2)) * (-d * d / (c2 * c2) + 1.0 / c2);
        }
        case kernel_family::laplacian:
            return -k.lambda * k.lambda * std::exp(-k.lambda * std::fabs(x - y));
        default:
            fail(errc::unsupported_kernel,
                 "kernel_dxdy is defined for the gaussian and laplacian families only");
    }
}

} // namespace mindiv
