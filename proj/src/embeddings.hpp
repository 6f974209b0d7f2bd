#pragma once

#include "kernels.hpp"
#include "targets.hpp"

namespace mindiv {

// A (target, kernel) pair with a closed-form mean embedding. Supported
// combinations: gaussian target with any gaussian-exponentiated form
// (including the plain gaussian and exponential kernels), skew gaussian
// target with gaussian kernel, and beta or uniform target with matern or
// laplacian kernel. truncation_order applies to the beta paths; zero picks
// the order automatically from the series tail bound.
struct embedding_pair {
    target_spec target;
    kernel_spec kernel;
    int truncation_order = 0;

    void validate() const;
};

struct truncated_sum {
    double value = 0.0;
    double bound = 0.0; // envelope on |true value - truncated value|
};

// Truncated series for the integral of y^a (1-y)^b e^{lambda y} on [0, z].
truncated_sum e1(double lambda, double z, double a, double b, int terms);

// Truncated series for the integral of y^a (1-y)^b e^{-lambda y} on [z, 1].
truncated_sum e2(double lambda, double z, double a, double b, int terms);

// Smallest truncation order whose tail envelope (max of the e1 and e2
// envelopes) is at or below tol. Search starts at ceil(|lambda|) + 10.
int choose_truncation(double lambda, double a, double b, double z, double tol);

// Value of the analytic mean embedding at x.
double mean_embedding(const embedding_pair& pair, double x);

// Expectation of the embedding under the target itself; closed-form for the
// gaussian target paths, quadrature of the analytic embedding otherwise.
double double_expectation(const embedding_pair& pair, double tol = 1e-10);

} // namespace mindiv
