#include "cem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

namespace mindiv {

weights weights::complete(const std::vector<double>& head) {
    weights out;
    out.w.reserve(head.size() + 1);
    out.w = head;
    double s = 0.0;
    for (double v : head) s += v;
    out.w.push_back(1.0 - s);
    return out;
}

void weights::validate() const {
    require(w.size() >= 2, errc::invalid_argument, "weights need at least two assets");
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    require(std::fabs(s - 1.0) <= 1e-12, errc::invalid_argument,
            "weights must sum to one within 1e-12");
}

void cem_config::validate(int dim) const {
    require(dim >= 2, errc::invalid_argument, "cem needs dimension >= 2");
    require(rho > 0.0 && rho < 1.0, errc::invalid_argument, "cem needs rho in (0,1)");
    require(beta_smooth > 0.0 && beta_smooth <= 1.0, errc::invalid_argument,
            "cem needs smoothing in (0,1]");
    require(samples_per_iter >= 2, errc::invalid_argument, "cem needs at least two samples");
    require(iterations >= 1, errc::invalid_argument, "cem needs at least one iteration");
    require(sigma_floor >= 0.0, errc::invalid_argument, "cem needs sigma_floor >= 0");
    const int rank = static_cast<int>(
        std::ceil((1.0 - rho) * static_cast<double>(samples_per_iter)));
    require(rank >= 1 && rank <= samples_per_iter, errc::invalid_argument,
            "cem quantile rank out of range");
    if (!init_mean.empty()) {
        require(static_cast<int>(init_mean.size()) == dim - 1, errc::invalid_argument,
                "cem init_mean must have d-1 entries");
    }
    if (!init_cov.empty()) {
        require(static_cast<int>(init_cov.size()) == (dim - 1) * (dim - 1),
                errc::invalid_argument, "cem init_cov must be (d-1)x(d-1)");
    }
}

cem_result cem_optimize(const std::function<double(const weights&)>& objective, int dim,
                        const cem_config& cfg) {
    cfg.validate(dim);
    const int k = dim - 1;
    const int s_count = cfg.samples_per_iter;

    Eigen::VectorXd mean(k);
    if (cfg.init_mean.empty()) {
        mean.setConstant(1.0 / static_cast<double>(dim));
    } else {
        for (int i = 0; i < k; ++i) mean(i) = cfg.init_mean[static_cast<std::size_t>(i)];
    }
    Eigen::MatrixXd cov(k, k);
    if (cfg.init_cov.empty()) {
        cov = 0.25 * 0.25 * Eigen::MatrixXd::Identity(k, k);
    } else {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                cov(i, j) = cfg.init_cov[static_cast<std::size_t>(i * k + j)];
        require(cov.isApprox(cov.transpose(), 1e-12), errc::invalid_argument,
                "cem init_cov must be symmetric");
    }

    rng gen(cfg.seed);
    cem_result result;
    result.best_value = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> heads(static_cast<std::size_t>(s_count));
    std::vector<double> values(static_cast<std::size_t>(s_count));
    int flat_elite_streak = 0;

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            // Regularize until the factorization goes through.
            Eigen::MatrixXd bumped = cov;
            double bump = std::max(cfg.sigma_floor, 1e-12);
            do {
                bumped += bump * Eigen::MatrixXd::Identity(k, k);
                llt.compute(bumped);
                bump *= 10.0;
            } while (llt.info() != Eigen::Success && bump < 1.0);
            require(llt.info() == Eigen::Success, errc::internal,
                    "cem covariance could not be factorized");
        }
        const Eigen::MatrixXd chol = llt.matrixL();

        for (int s = 0; s < s_count; ++s) {
            Eigen::VectorXd z(k);
            for (int i = 0; i < k; ++i) z(i) = gen.normal();
            const Eigen::VectorXd y = mean + chol * z;
            auto& head = heads[static_cast<std::size_t>(s)];
            head.assign(y.data(), y.data() + k);
            const weights cand = weights::complete(head);
            values[static_cast<std::size_t>(s)] = objective(cand);
        }

        // Level at the (1-rho) quantile: order statistic of rank ceil((1-rho)S).
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        const int rank = static_cast<int>(
            std::ceil((1.0 - cfg.rho) * static_cast<double>(s_count)));
        const double gamma = sorted[static_cast<std::size_t>(rank - 1)];

        Eigen::VectorXd elite_mean = Eigen::VectorXd::Zero(k);
        int elite_count = 0;
        for (int s = 0; s < s_count; ++s) {
            if (values[static_cast<std::size_t>(s)] >= gamma) {
                ++elite_count;
                for (int i = 0; i < k; ++i)
                    elite_mean(i) += heads[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
            }
        }
        elite_mean /= static_cast<double>(elite_count);
        Eigen::MatrixXd elite_cov = Eigen::MatrixXd::Zero(k, k);
        double elite_min = std::numeric_limits<double>::infinity();
        double elite_max = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < s_count; ++s) {
            const double v = values[static_cast<std::size_t>(s)];
            if (v < gamma) continue;
            elite_min = std::min(elite_min, v);
            elite_max = std::max(elite_max, v);
            Eigen::VectorXd d(k);
            for (int i = 0; i < k; ++i)
                d(i) = heads[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] -
                       elite_mean(i);
            elite_cov += d * d.transpose();
        }
        elite_cov /= static_cast<double>(elite_count);
        const double raw_spread = elite_cov.diagonal().maxCoeff();
        elite_cov += cfg.sigma_floor * Eigen::MatrixXd::Identity(k, k);

        mean = (1.0 - cfg.beta_smooth) * mean + cfg.beta_smooth * elite_mean;
        cov = (1.0 - cfg.beta_smooth) * cov + cfg.beta_smooth * elite_cov;

        for (int s = 0; s < s_count; ++s) {
            if (values[static_cast<std::size_t>(s)] > result.best_value) {
                result.best_value = values[static_cast<std::size_t>(s)];
                result.best_seen = weights::complete(heads[static_cast<std::size_t>(s)]);
            }
        }

        cem_trace_row row;
        row.iteration = iter;
        row.gamma = gamma;
        row.elite_count = elite_count;
        row.mean.assign(mean.data(), mean.data() + k);
        row.cov_diag.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) row.cov_diag[static_cast<std::size_t>(i)] = cov(i, i);
        result.trace.push_back(std::move(row));

        flat_elite_streak =
            (elite_max == elite_min && raw_spread < cfg.sigma_floor) ? flat_elite_streak + 1 : 0;
        if (flat_elite_streak >= 5) {
            result.degenerate = true;
            break;
        }
    }

    std::vector<double> final_head(mean.data(), mean.data() + k);
    result.optimum = weights::complete(final_head);
    if (result.best_seen.w.empty()) result.best_seen = result.optimum;
    return result;
}

weights simplex_sampler_dirichlet(const std::vector<double>& concentration,
                                  std::uint64_t seed) {
    require(concentration.size() >= 2, errc::invalid_argument,
            "dirichlet sampler needs dimension >= 2");
    for (double a : concentration)
        require(a > 0.0, errc::invalid_argument, "dirichlet concentrations must be positive");
    rng gen(seed);
    weights out;
    out.w.resize(concentration.size());
    double total = 0.0;
    for (std::size_t i = 0; i < concentration.size(); ++i) {
        out.w[i] = gen.gamma(concentration[i]);
        total += out.w[i];
    }
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < out.w.size(); ++i) {
        out.w[i] /= total;
        head += out.w[i];
    }
    out.w.back() = 1.0 - head;
    return out;
}

} // namespace mindiv
