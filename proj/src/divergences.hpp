#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "targets.hpp"

namespace mindiv {

enum class divergence_kind {
    mmd_two_sample_u,
    mmd_two_sample_v,
    mmd_semi_explicit_u,
    mmd_semi_explicit_v,
    ksd_v,
    ksd_u,
    fssd,
    wasserstein,
    kl_gaussian,
};

enum class statistic_variant { u, v };

// How kernel length parameters are set at estimation time: fixed from the
// spec, or recomputed from the standard deviation of the evaluated sample.
enum class bandwidth_rule { fixed, sample_std };

struct divergence_config {
    divergence_kind kind = divergence_kind::mmd_semi_explicit_u;
    std::optional<kernel_spec> kernel;
    target_spec target;
    double wad_p = 1.0;
    std::vector<double> fssd_locations;
    std::size_t target_sample_size = 10000; // M for the two-sample kinds
    bool drop_constant_term = false;
    bandwidth_rule bandwidth = bandwidth_rule::fixed;
    int truncation_order = 0;

    void validate() const;
};

struct divergence_estimate {
    double value = 0.0;
    divergence_kind kind = divergence_kind::mmd_semi_explicit_u;
    std::size_t n_samples = 0;
    std::size_t m_samples = 0;
    bool constant_term_included = true;
};

struct value_se {
    double value = 0.0;
    double se = 0.0;
};

const char* divergence_kind_name(divergence_kind k);
divergence_kind divergence_kind_from_name(const std::string& name);

double mmd2_two_sample(const kernel_spec& k, std::span<const double> xs,
                       std::span<const double> ys, statistic_variant variant,
                       bool drop_constant_term = false);

double mmd2_semi_explicit(const kernel_spec& k, const target_spec& t,
                          std::span<const double> xs, statistic_variant variant,
                          bool drop_constant_term = false, int truncation_order = 0);

// Stein kernel h_q(x, y); the gaussian-target gaussian-kernel pair uses the
// closed form, everything else the generic assembly from score and kernel
// derivatives.
double stein_kernel(const kernel_spec& k, const target_spec& t, double x, double y);
double stein_kernel_generic(const kernel_spec& k, const target_spec& t, double x, double y);

double ksd2(const kernel_spec& k, const target_spec& t, std::span<const double> xs,
            statistic_variant variant);

// U-statistic KSD with the degenerate-case standard error estimate
// sqrt(2 Var(h) / (N(N-1))).
value_se ksd2_u_with_se(const kernel_spec& k, const target_spec& t,
                        std::span<const double> xs);

double fssd2(const kernel_spec& k, const target_spec& t, std::span<const double> xs,
             std::span<const double> locations);

// Order-p Wasserstein distance between the empirical measure of xs and the
// target, through the quantile form on the midpoint grid (j - 1/2) / N.
double wasserstein_p(std::span<const double> xs, const target_spec& t, double p);

// Exact order-p Wasserstein distance between two empirical measures.
double wasserstein_p_empirical(std::span<const double> xs, std::span<const double> ys, double p);

// Gaussian-target KL objective: quadratic moment term minus a spacing
// entropy estimate.
double kl_gaussian_objective(std::span<const double> xs, const target_spec& gaussian_target);

// Vasicek m-spacing entropy with m = floor(sqrt(N)) and boundary-corrected
// spacing coefficients.
double vasicek_entropy(std::span<const double> xs);

// One-stop estimator used by the C API and the CLI. Two-sample kinds use ys
// when given and otherwise draw target_sample_size points from the target
// with the provided seed.
divergence_estimate estimate(const divergence_config& cfg, std::span<const double> xs,
                             std::span<const double> ys = {}, std::uint64_t seed = 0);

// Kernel with length parameters resolved against a sample per the bandwidth
// rule of the config.
kernel_spec resolve_bandwidth(const kernel_spec& k, bandwidth_rule rule,
                              std::span<const double> xs);

} // namespace mindiv
