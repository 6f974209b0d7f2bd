#pragma once

namespace mindiv::special {

// Standard normal cdf and its inverse.
double norm_cdf(double x);
double norm_quantile(double p);

// log of the complete beta function.
double log_beta(double a, double b);

// Complete beta function B(a,b).
double beta_fn(double a, double b);

// Regularized incomplete beta I_z(a,b), a,b > 0, z in [0,1].
double ibeta_reg(double a, double b, double z);

// Non-regularized incomplete beta: integral of t^{a-1}(1-t)^{b-1} on [0,z].
double ibeta(double a, double b, double z);

// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);

// phi(x)/Phi(x), numerically stable for very negative x.
double inverse_mills(double x);

// Owen's T function T(h, a); used by the skew Gaussian cdf.
double owens_t(double h, double a);

} // namespace mindiv::special
