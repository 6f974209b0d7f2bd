#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mindiv {

enum class target_family {
    gaussian,           // mean m, std sigma
    generalized_normal, // location alpha, scale beta, tail exponent gamma
    skew_gaussian,      // shape s, location m, scale^2 v
    beta,               // shapes alpha, beta on [0,1]
    uniform,            // on [0,1]
};

struct moment_set {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct target_spec {
    target_family family = target_family::gaussian;
    double m = 0.0;
    double sigma = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    double gamma = 2.0;
    double s = 0.0;
    double v = 1.0;

    static target_spec gaussian(double m, double sigma);
    static target_spec generalized_normal(double alpha, double beta, double gamma);
    static target_spec skew_gaussian(double s, double m, double v);
    static target_spec beta_dist(double alpha, double beta);
    static target_spec uniform();

    void validate() const;
    std::string describe() const;

    // True when the support is the unit interval.
    bool bounded_support() const {
        return family == target_family::beta || family == target_family::uniform;
    }
};

double pdf(const target_spec& t, double x);
double log_pdf(const target_spec& t, double x);

// Derivative of log pdf at an interior point of the support.
double score(const target_spec& t, double x);

// Analytic mean, variance, skewness, excess kurtosis.
moment_set moments(const target_spec& t);

double cdf(const target_spec& t, double x);

// Monotone quantile function on (0,1).
double inverse_cdf(const target_spec& t, double u);

// n i.i.d. draws, deterministic for a given seed.
std::vector<double> sample(const target_spec& t, std::size_t n, std::uint64_t seed);

// Beta spec with the requested mean and variance; requires
// variance < mean(1-mean).
target_spec beta_from_moments(double mean, double variance);

// Re-locates a target family to the requested mean and standard deviation,
// keeping its shape parameters (tail exponent, skew) fixed.
target_spec with_moments(const target_spec& shape, double mean, double stddev);

} // namespace mindiv
