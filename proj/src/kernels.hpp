#pragma once

#include <string>

namespace mindiv {

enum class kernel_family {
    gaussian_exponentiated, // exp(-a(x-y)^2 + b x y)
    matern,                 // half-integer smoothness p + 1/2
    gaussian,               // exp(-(x-y)^2 / (2 c^2))
    laplacian,              // exp(-lambda |x-y|)
    exponential,            // exp(b x y)
};

// Closed algebraic description of one kernel; parameter fields are used
// according to the family.
struct kernel_spec {
    kernel_family family = kernel_family::gaussian;
    double a = 0.0;
    double b = 0.0;
    double sigma0 = 1.0;
    double sigma = 1.0;
    int p = 0;
    double c = 1.0;
    double lambda = 1.0;

    static kernel_spec gaussian_exponentiated(double a, double b);
    static kernel_spec matern(double sigma0, double sigma, int p);
    static kernel_spec gaussian(double c);
    static kernel_spec laplacian(double lambda);
    static kernel_spec exponential(double b);

    void validate() const;
    std::string describe() const;

    // True when the kernel contains an exp(b x y) factor with b > 0.
    bool unbounded() const {
        return (family == kernel_family::exponential) ||
               (family == kernel_family::gaussian_exponentiated && b > 0.0);
    }
};

double kernel_eval(const kernel_spec& k, double x, double y);

// First partial in x and the mixed second partial; defined for the Gaussian
// and Laplacian families. The Laplacian sign at x == y is taken as zero.
double kernel_dx(const kernel_spec& k, double x, double y);
double kernel_dxdy(const kernel_spec& k, double x, double y);

} // namespace mindiv
