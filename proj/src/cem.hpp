#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mindiv {

// Portfolio allocation on the budget hyperplane (coordinates sum to one).
struct weights {
    std::vector<double> w;

    // Rebuilds the last coordinate from the first d-1 so the sum is exact.
    static weights complete(const std::vector<double>& head);
    void validate() const;
};

struct cem_config {
    double rho = 0.1;          // elite quantile parameter
    double beta_smooth = 0.7;  // smoothing weight on the new parameter
    int samples_per_iter = 200;
    int iterations = 50;
    std::vector<double> init_mean;    // d-1 entries; empty for equal weight
    std::vector<double> init_cov;     // (d-1)^2 row-major; empty for 0.25^2 I
    std::uint64_t seed = 0;
    double sigma_floor = 1e-8;

    void validate(int dim) const;
};

struct cem_trace_row {
    int iteration = 0;
    double gamma = 0.0;
    int elite_count = 0;
    std::vector<double> mean;
    std::vector<double> cov_diag;
};

struct cem_result {
    weights optimum;              // completed mean of the final distribution
    weights best_seen;            // best sampled candidate across iterations
    double best_value = 0.0;
    bool degenerate = false;
    std::vector<cem_trace_row> trace;
};

// Maximizes the objective over the budget hyperplane by iterating gaussian
// sampling in d-1 coordinates, elite selection at the (1-rho) order
// statistic, moment refits on the elite and smoothing.
cem_result cem_optimize(const std::function<double(const weights&)>& objective, int dim,
                        const cem_config& cfg);

// One draw from a Dirichlet distribution on the nonnegative simplex.
weights simplex_sampler_dirichlet(const std::vector<double>& concentration, std::uint64_t seed);

} // namespace mindiv
