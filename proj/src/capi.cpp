#include "mindiv/mindiv.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "backtest.hpp"
#include "cem.hpp"
#include "divergences.hpp"
#include "embeddings.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "panel.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "targets.hpp"

using namespace mindiv;

namespace {

thread_local std::string g_last_error;

mindiv_status status_of(errc c) {
    switch (c) {
        case errc::ok: return MINDIV_OK;
        case errc::invalid_argument: return MINDIV_ERR_INVALID_ARGUMENT;
        case errc::unsupported_kernel: return MINDIV_ERR_UNSUPPORTED_KERNEL;
        case errc::unsupported_pair: return MINDIV_ERR_UNSUPPORTED_PAIR;
        case errc::divergent_parameter: return MINDIV_ERR_DIVERGENT_PARAMETER;
        case errc::out_of_support: return MINDIV_ERR_OUT_OF_SUPPORT;
        case errc::domain_error: return MINDIV_ERR_DOMAIN;
        case errc::infeasible: return MINDIV_ERR_INFEASIBLE;
        case errc::insufficient_samples: return MINDIV_ERR_INSUFFICIENT_SAMPLES;
        case errc::truncation_failure: return MINDIV_ERR_TRUNCATION_FAILURE;
        case errc::no_locations: return MINDIV_ERR_NO_LOCATIONS;
        case errc::parse_error: return MINDIV_ERR_PARSE;
        case errc::missing_cell: return MINDIV_ERR_MISSING_CELL;
        case errc::non_monotone_dates: return MINDIV_ERR_NON_MONOTONE_DATES;
        case errc::panel_too_short: return MINDIV_ERR_PANEL_TOO_SHORT;
        case errc::singular_covariance: return MINDIV_ERR_SINGULAR_COVARIANCE;
        case errc::unknown_experiment: return MINDIV_ERR_UNKNOWN_EXPERIMENT;
        case errc::io_error: return MINDIV_ERR_IO;
        case errc::internal: return MINDIV_ERR_INTERNAL;
    }
    return MINDIV_ERR_INTERNAL;
}

template <typename F>
mindiv_status guarded(F&& fn) {
    try {
        fn();
        return MINDIV_OK;
    } catch (const error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MINDIV_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MINDIV_ERR_INTERNAL;
    }
}

mindiv_status invalid(const char* msg) {
    g_last_error = msg;
    return MINDIV_ERR_INVALID_ARGUMENT;
}

} // namespace

struct mindiv_kernel {
    kernel_spec spec;
};
struct mindiv_target {
    target_spec spec;
};
struct mindiv_divergence {
    divergence_config cfg;
};
struct mindiv_panel {
    returns_panel panel;
};
struct mindiv_cem_trace {
    std::vector<cem_trace_row> rows;
};
struct mindiv_backtest_config {
    backtest_config cfg;
};
struct mindiv_backtest_results {
    std::vector<bucket_result> rows;
    std::vector<winner_count> scratch_winners;
};

extern "C" {

const char* mindiv_status_name(mindiv_status status) {
    switch (status) {
        case MINDIV_OK: return "ok";
        case MINDIV_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case MINDIV_ERR_UNSUPPORTED_KERNEL: return "unsupported_kernel";
        case MINDIV_ERR_UNSUPPORTED_PAIR: return "unsupported_pair";
        case MINDIV_ERR_DIVERGENT_PARAMETER: return "divergent_parameter";
        case MINDIV_ERR_OUT_OF_SUPPORT: return "out_of_support";
        case MINDIV_ERR_DOMAIN: return "domain_error";
        case MINDIV_ERR_INFEASIBLE: return "infeasible";
        case MINDIV_ERR_INSUFFICIENT_SAMPLES: return "insufficient_samples";
        case MINDIV_ERR_TRUNCATION_FAILURE: return "truncation_failure";
        case MINDIV_ERR_NO_LOCATIONS: return "no_locations";
        case MINDIV_ERR_PARSE: return "parse_error";
        case MINDIV_ERR_MISSING_CELL: return "missing_cell";
        case MINDIV_ERR_NON_MONOTONE_DATES: return "non_monotone_dates";
        case MINDIV_ERR_PANEL_TOO_SHORT: return "panel_too_short";
        case MINDIV_ERR_SINGULAR_COVARIANCE: return "singular_covariance";
        case MINDIV_ERR_UNKNOWN_EXPERIMENT: return "unknown_experiment";
        case MINDIV_ERR_IO: return "io_error";
        case MINDIV_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* mindiv_last_error(void) { return g_last_error.c_str(); }

void mindiv_set_threads(unsigned n) { set_max_threads(n); }

/* ---------------- kernels ---------------- */

#define MINDIV_MAKE(handle_type, out, expr)                                    \
    do {                                                                       \
        if (!(out)) return invalid("null output pointer");                     \
        return guarded([&] { *(out) = new handle_type{(expr)}; });             \
    } while (0)

mindiv_status mindiv_kernel_create_gaussian(double c, mindiv_kernel** out) {
    MINDIV_MAKE(mindiv_kernel, out, kernel_spec::gaussian(c));
}
mindiv_status mindiv_kernel_create_laplacian(double lambda, mindiv_kernel** out) {
    MINDIV_MAKE(mindiv_kernel, out, kernel_spec::laplacian(lambda));
}
mindiv_status mindiv_kernel_create_exponential(double b, mindiv_kernel** out) {
    MINDIV_MAKE(mindiv_kernel, out, kernel_spec::exponential(b));
}
mindiv_status mindiv_kernel_create_gaussian_exponentiated(double a, double b,
                                                          mindiv_kernel** out) {
    MINDIV_MAKE(mindiv_kernel, out, kernel_spec::gaussian_exponentiated(a, b));
}
mindiv_status mindiv_kernel_create_matern(double sigma0, double sigma, int p,
                                          mindiv_kernel** out) {
    MINDIV_MAKE(mindiv_kernel, out, kernel_spec::matern(sigma0, sigma, p));
}
void mindiv_kernel_free(mindiv_kernel* kernel) { delete kernel; }

mindiv_status mindiv_kernel_eval(const mindiv_kernel* kernel, double x, double y, double* out) {
    if (!kernel || !out) return invalid("null argument");
    return guarded([&] { *out = kernel_eval(kernel->spec, x, y); });
}
mindiv_status mindiv_kernel_dx(const mindiv_kernel* kernel, double x, double y, double* out) {
    if (!kernel || !out) return invalid("null argument");
    return guarded([&] { *out = kernel_dx(kernel->spec, x, y); });
}
mindiv_status mindiv_kernel_dxdy(const mindiv_kernel* kernel, double x, double y, double* out) {
    if (!kernel || !out) return invalid("null argument");
    return guarded([&] { *out = kernel_dxdy(kernel->spec, x, y); });
}

/* ---------------- targets ---------------- */

mindiv_status mindiv_target_create_gaussian(double m, double sigma, mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, target_spec::gaussian(m, sigma));
}
mindiv_status mindiv_target_create_generalized_normal(double alpha, double beta, double gamma,
                                                      mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, target_spec::generalized_normal(alpha, beta, gamma));
}
mindiv_status mindiv_target_create_skew_gaussian(double s, double m, double v,
                                                 mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, target_spec::skew_gaussian(s, m, v));
}
mindiv_status mindiv_target_create_beta(double alpha, double beta, mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, target_spec::beta_dist(alpha, beta));
}
mindiv_status mindiv_target_create_uniform(mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, target_spec::uniform());
}
mindiv_status mindiv_target_from_moments(const mindiv_target* shape, double mean, double stddev,
                                         mindiv_target** out) {
    if (!shape) return invalid("null target");
    MINDIV_MAKE(mindiv_target, out, with_moments(shape->spec, mean, stddev));
}
mindiv_status mindiv_beta_from_moments(double mean, double variance, mindiv_target** out) {
    MINDIV_MAKE(mindiv_target, out, beta_from_moments(mean, variance));
}
void mindiv_target_free(mindiv_target* target) { delete target; }

mindiv_status mindiv_target_pdf(const mindiv_target* target, double x, double* out) {
    if (!target || !out) return invalid("null argument");
    return guarded([&] { *out = pdf(target->spec, x); });
}
mindiv_status mindiv_target_score(const mindiv_target* target, double x, double* out) {
    if (!target || !out) return invalid("null argument");
    return guarded([&] { *out = score(target->spec, x); });
}
mindiv_status mindiv_target_cdf(const mindiv_target* target, double x, double* out) {
    if (!target || !out) return invalid("null argument");
    return guarded([&] { *out = cdf(target->spec, x); });
}
mindiv_status mindiv_target_inverse_cdf(const mindiv_target* target, double u, double* out) {
    if (!target || !out) return invalid("null argument");
    return guarded([&] { *out = inverse_cdf(target->spec, u); });
}
mindiv_status mindiv_target_moments(const mindiv_target* target, double* mean, double* variance,
                                    double* skewness, double* excess_kurtosis) {
    if (!target) return invalid("null target");
    return guarded([&] {
        const moment_set mm = moments(target->spec);
        if (mean) *mean = mm.mean;
        if (variance) *variance = mm.variance;
        if (skewness) *skewness = mm.skewness;
        if (excess_kurtosis) *excess_kurtosis = mm.excess_kurtosis;
    });
}
mindiv_status mindiv_target_sample(const mindiv_target* target, size_t n, uint64_t seed,
                                   double* out) {
    if (!target || !out) return invalid("null argument");
    return guarded([&] {
        const auto draws = sample(target->spec, n, seed);
        std::memcpy(out, draws.data(), draws.size() * sizeof(double));
    });
}

/* ---------------- embeddings ---------------- */

mindiv_status mindiv_mean_embedding(const mindiv_target* target, const mindiv_kernel* kernel,
                                    int truncation_order, double x, double* out) {
    if (!target || !kernel || !out) return invalid("null argument");
    return guarded([&] {
        embedding_pair pair{target->spec, kernel->spec, truncation_order};
        *out = mean_embedding(pair, x);
    });
}

mindiv_status mindiv_double_expectation(const mindiv_target* target,
                                        const mindiv_kernel* kernel, double tol, double* out) {
    if (!target || !kernel || !out) return invalid("null argument");
    return guarded([&] {
        embedding_pair pair{target->spec, kernel->spec, 0};
        *out = double_expectation(pair, tol > 0 ? tol : 1e-10);
    });
}

mindiv_status mindiv_e1(double lambda, double z, double a, double b, int terms, double* value,
                        double* bound) {
    if (!value || !bound) return invalid("null output pointer");
    return guarded([&] {
        const auto r = e1(lambda, z, a, b, terms);
        *value = r.value;
        *bound = r.bound;
    });
}
mindiv_status mindiv_e2(double lambda, double z, double a, double b, int terms, double* value,
                        double* bound) {
    if (!value || !bound) return invalid("null output pointer");
    return guarded([&] {
        const auto r = e2(lambda, z, a, b, terms);
        *value = r.value;
        *bound = r.bound;
    });
}
mindiv_status mindiv_choose_truncation(double lambda, double a, double b, double z, double tol,
                                       int* out) {
    if (!out) return invalid("null output pointer");
    return guarded([&] { *out = choose_truncation(lambda, a, b, z, tol); });
}

/* ---------------- divergences ---------------- */

mindiv_status mindiv_divergence_create(const char* kind, const mindiv_kernel* kernel,
                                       const mindiv_target* target, mindiv_divergence** out) {
    if (!kind || !target || !out) return invalid("null argument");
    return guarded([&] {
        divergence_config cfg;
        cfg.kind = divergence_kind_from_name(kind);
        if (kernel) cfg.kernel = kernel->spec;
        cfg.target = target->spec;
        cfg.validate();
        *out = new mindiv_divergence{std::move(cfg)};
    });
}
void mindiv_divergence_free(mindiv_divergence* divergence) { delete divergence; }

mindiv_status mindiv_divergence_set_wad_p(mindiv_divergence* divergence, double p) {
    if (!divergence) return invalid("null divergence");
    return guarded([&] {
        require(p >= 1.0, errc::invalid_argument, "wasserstein order must be >= 1");
        divergence->cfg.wad_p = p;
    });
}
mindiv_status mindiv_divergence_set_fssd_locations(mindiv_divergence* divergence,
                                                   const double* locations, size_t count) {
    if (!divergence || (!locations && count > 0)) return invalid("null argument");
    divergence->cfg.fssd_locations.assign(locations, locations + count);
    return MINDIV_OK;
}
mindiv_status mindiv_divergence_set_target_sample_size(mindiv_divergence* divergence,
                                                       size_t m) {
    if (!divergence) return invalid("null divergence");
    return guarded([&] {
        require(m >= 2, errc::invalid_argument, "target sample size must be at least 2");
        divergence->cfg.target_sample_size = m;
    });
}
mindiv_status mindiv_divergence_set_drop_constant_term(mindiv_divergence* divergence,
                                                       int drop) {
    if (!divergence) return invalid("null divergence");
    divergence->cfg.drop_constant_term = drop != 0;
    return MINDIV_OK;
}
mindiv_status mindiv_divergence_set_bandwidth_rule(mindiv_divergence* divergence,
                                                   const char* rule) {
    if (!divergence || !rule) return invalid("null argument");
    const std::string r(rule);
    if (r == "fixed") {
        divergence->cfg.bandwidth = bandwidth_rule::fixed;
    } else if (r == "sample_std") {
        divergence->cfg.bandwidth = bandwidth_rule::sample_std;
    } else {
        return invalid("bandwidth rule must be 'fixed' or 'sample_std'");
    }
    return MINDIV_OK;
}
mindiv_status mindiv_divergence_set_truncation_order(mindiv_divergence* divergence, int order) {
    if (!divergence) return invalid("null divergence");
    divergence->cfg.truncation_order = order;
    return MINDIV_OK;
}

mindiv_status mindiv_divergence_estimate(const mindiv_divergence* divergence, const double* xs,
                                         size_t n, const double* ys, size_t m, uint64_t seed,
                                         mindiv_estimate_result* out) {
    if (!divergence || !xs || !out) return invalid("null argument");
    if (!ys && m > 0) return invalid("ys is null but m > 0");
    return guarded([&] {
        const auto r = estimate(divergence->cfg, std::span<const double>(xs, n),
                                std::span<const double>(ys, ys ? m : 0), seed);
        out->value = r.value;
        out->n_samples = r.n_samples;
        out->m_samples = r.m_samples;
        out->constant_term_included = r.constant_term_included ? 1 : 0;
    });
}

mindiv_status mindiv_stein_kernel(const mindiv_kernel* kernel, const mindiv_target* target,
                                  double x, double y, double* out) {
    if (!kernel || !target || !out) return invalid("null argument");
    return guarded([&] { *out = stein_kernel(kernel->spec, target->spec, x, y); });
}

/* ---------------- cross-entropy optimizer ---------------- */

void mindiv_cem_config_defaults(mindiv_cem_config* cfg) {
    if (!cfg) return;
    cfg->rho = 0.1;
    cfg->beta_smooth = 0.7;
    cfg->samples_per_iter = 200;
    cfg->iterations = 50;
    cfg->seed = 0;
    cfg->sigma_floor = 1e-8;
    cfg->init_mean = nullptr;
    cfg->init_cov = nullptr;
}

namespace {

cem_config convert_cem(const mindiv_cem_config* cfg, size_t dim) {
    cem_config out;
    if (!cfg) return out;
    out.rho = cfg->rho;
    out.beta_smooth = cfg->beta_smooth;
    out.samples_per_iter = cfg->samples_per_iter;
    out.iterations = cfg->iterations;
    out.seed = cfg->seed;
    out.sigma_floor = cfg->sigma_floor;
    if (cfg->init_mean) out.init_mean.assign(cfg->init_mean, cfg->init_mean + dim - 1);
    if (cfg->init_cov)
        out.init_cov.assign(cfg->init_cov, cfg->init_cov + (dim - 1) * (dim - 1));
    return out;
}

} // namespace

mindiv_status mindiv_cem_optimize(mindiv_objective_fn objective, void* context, size_t dim,
                                  const mindiv_cem_config* cfg, double* weights_out,
                                  double* best_value_out, mindiv_cem_trace** trace_out) {
    if (!objective || !weights_out) return invalid("null argument");
    return guarded([&] {
        const cem_config cc = convert_cem(cfg, dim);
        auto fn = [&](const weights& w) {
            double value = 0.0;
            const int rc = objective(context, w.w.data(), w.w.size(), &value);
            require(rc == 0, errc::invalid_argument, "objective callback reported failure");
            return value;
        };
        const auto result = cem_optimize(fn, static_cast<int>(dim), cc);
        std::memcpy(weights_out, result.optimum.w.data(), dim * sizeof(double));
        if (best_value_out) *best_value_out = result.best_value;
        if (trace_out) *trace_out = new mindiv_cem_trace{result.trace};
    });
}

size_t mindiv_cem_trace_length(const mindiv_cem_trace* trace) {
    return trace ? trace->rows.size() : 0;
}

mindiv_status mindiv_cem_trace_row(const mindiv_cem_trace* trace, size_t index, int* iteration,
                                   double* gamma, int* elite_count, double* mean_out,
                                   double* cov_diag_out) {
    if (!trace) return invalid("null trace");
    if (index >= trace->rows.size()) return invalid("trace index out of range");
    const auto& row = trace->rows[index];
    if (iteration) *iteration = row.iteration;
    if (gamma) *gamma = row.gamma;
    if (elite_count) *elite_count = row.elite_count;
    if (mean_out) std::memcpy(mean_out, row.mean.data(), row.mean.size() * sizeof(double));
    if (cov_diag_out)
        std::memcpy(cov_diag_out, row.cov_diag.data(), row.cov_diag.size() * sizeof(double));
    return MINDIV_OK;
}

void mindiv_cem_trace_free(mindiv_cem_trace* trace) { delete trace; }

mindiv_status mindiv_dirichlet_sample(const double* concentration, size_t dim, uint64_t seed,
                                      double* weights_out) {
    if (!concentration || !weights_out) return invalid("null argument");
    return guarded([&] {
        const std::vector<double> conc(concentration, concentration + dim);
        const auto w = simplex_sampler_dirichlet(conc, seed);
        std::memcpy(weights_out, w.w.data(), dim * sizeof(double));
    });
}

mindiv_status mindiv_portfolio_optimize(const mindiv_divergence* divergence,
                                        const double* returns, size_t rows, size_t dim,
                                        const mindiv_cem_config* cfg, uint64_t seed,
                                        double* weights_out, mindiv_cem_trace** trace_out) {
    if (!divergence || !returns || !weights_out) return invalid("null argument");
    return guarded([&] {
        require(dim >= 2, errc::invalid_argument, "portfolio needs at least two assets");
        require(rows >= 2, errc::insufficient_samples, "portfolio needs at least two rows");
        const bool two_sample =
            divergence->cfg.kind == divergence_kind::mmd_two_sample_u ||
            divergence->cfg.kind == divergence_kind::mmd_two_sample_v;
        std::vector<double> target_draws;
        if (two_sample) {
            target_draws = sample(divergence->cfg.target, divergence->cfg.target_sample_size,
                                  derive_seed(seed, 1));
        }
        divergence_config live = divergence->cfg;
        if (live.kind == divergence_kind::fssd && live.fssd_locations.empty()) {
            std::vector<double> base(rows);
            for (size_t r = 0; r < rows; ++r) {
                double acc = 0.0;
                for (size_t c = 0; c < dim; ++c) acc += returns[r * dim + c] / double(dim);
                base[r] = acc;
            }
            double m = 0.0;
            for (double x : base) m += x;
            m /= double(rows);
            double v = 0.0;
            for (double x : base) v += (x - m) * (x - m);
            v /= double(rows);
            live.fssd_locations =
                sample(target_spec::gaussian(m, std::sqrt(std::max(v, 1e-24))), 5,
                       derive_seed(seed, 2));
        }
        std::vector<double> xs(rows);
        auto objective = [&](const weights& w) {
            for (size_t r = 0; r < rows; ++r) {
                double acc = 0.0;
                for (size_t c = 0; c < dim; ++c) acc += w.w[c] * returns[r * dim + c];
                xs[r] = acc;
            }
            return -estimate(live, xs, target_draws, derive_seed(seed, 3)).value;
        };
        cem_config cc = convert_cem(cfg, dim);
        if (!cfg) cc.seed = seed;
        const auto result = cem_optimize(objective, static_cast<int>(dim), cc);
        std::memcpy(weights_out, result.optimum.w.data(), dim * sizeof(double));
        if (trace_out) *trace_out = new mindiv_cem_trace{result.trace};
    });
}

/* ---------------- panels and backtests ---------------- */

mindiv_status mindiv_panel_read_csv(const char* path, int percent_units, mindiv_panel** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        *out = new mindiv_panel{
            ingest_csv(path, percent_units ? return_units::percent : return_units::decimal)};
    });
}
void mindiv_panel_free(mindiv_panel* panel) { delete panel; }

size_t mindiv_panel_rows(const mindiv_panel* panel) { return panel ? panel->panel.rows() : 0; }
size_t mindiv_panel_cols(const mindiv_panel* panel) { return panel ? panel->panel.cols() : 0; }

mindiv_status mindiv_panel_value(const mindiv_panel* panel, size_t row, size_t col,
                                 double* out) {
    if (!panel || !out) return invalid("null argument");
    if (row >= panel->panel.rows() || col >= panel->panel.cols())
        return invalid("panel index out of range");
    *out = panel->panel.at(row, col);
    return MINDIV_OK;
}
const char* mindiv_panel_date(const mindiv_panel* panel, size_t row) {
    if (!panel || row >= panel->panel.rows()) return nullptr;
    return panel->panel.dates[row].c_str();
}
const char* mindiv_panel_asset(const mindiv_panel* panel, size_t col) {
    if (!panel || col >= panel->panel.cols()) return nullptr;
    return panel->panel.assets[col].c_str();
}

mindiv_status mindiv_backtest_config_create(mindiv_backtest_config** out) {
    if (!out) return invalid("null output pointer");
    return guarded([&] { *out = new mindiv_backtest_config{}; });
}
void mindiv_backtest_config_free(mindiv_backtest_config* cfg) { delete cfg; }

mindiv_status mindiv_backtest_set_windows(mindiv_backtest_config* cfg, size_t estimation,
                                          size_t evaluation) {
    if (!cfg) return invalid("null config");
    cfg->cfg.estimation_window = estimation;
    cfg->cfg.evaluation_window = evaluation;
    return MINDIV_OK;
}
mindiv_status mindiv_backtest_set_regime_multiplier(mindiv_backtest_config* cfg,
                                                    double multiplier) {
    if (!cfg) return invalid("null config");
    cfg->cfg.regime_multiplier = multiplier;
    return MINDIV_OK;
}
mindiv_status mindiv_backtest_set_seed(mindiv_backtest_config* cfg, uint64_t seed) {
    if (!cfg) return invalid("null config");
    cfg->cfg.seed = seed;
    return MINDIV_OK;
}
mindiv_status mindiv_backtest_set_cem(mindiv_backtest_config* cfg,
                                      const mindiv_cem_config* cem) {
    if (!cfg || !cem) return invalid("null argument");
    cfg->cfg.cem = convert_cem(cem, 2);
    cfg->cfg.cem.init_mean.clear();
    cfg->cfg.cem.init_cov.clear();
    return MINDIV_OK;
}

mindiv_status mindiv_backtest_add_builtin(mindiv_backtest_config* cfg, const char* name,
                                          const char* rule) {
    if (!cfg || !name || !rule) return invalid("null argument");
    strategy_spec spec;
    spec.name = name;
    const std::string r(rule);
    if (r == "equal_weight") {
        spec.kind = strategy_spec::rule::equal_weight;
    } else if (r == "min_variance") {
        spec.kind = strategy_spec::rule::min_variance;
    } else if (r == "max_sharpe_bs") {
        spec.kind = strategy_spec::rule::max_sharpe_bs;
    } else {
        return invalid("builtin rule must be equal_weight, min_variance or max_sharpe_bs");
    }
    cfg->cfg.strategies.push_back(std::move(spec));
    return MINDIV_OK;
}

mindiv_status mindiv_backtest_add_strategy(mindiv_backtest_config* cfg, const char* name,
                                           const mindiv_divergence* divergence,
                                           int relocate_target) {
    if (!cfg || !name || !divergence) return invalid("null argument");
    strategy_spec spec;
    spec.name = name;
    spec.kind = strategy_spec::rule::divergence;
    spec.divergence = divergence->cfg;
    spec.relocate_target = relocate_target != 0;
    cfg->cfg.strategies.push_back(std::move(spec));
    return MINDIV_OK;
}

mindiv_status mindiv_backtest_bucket_count(const mindiv_panel* panel,
                                           const mindiv_backtest_config* cfg, size_t* out) {
    if (!panel || !cfg || !out) return invalid("null argument");
    return guarded([&] { *out = make_buckets(panel->panel, cfg->cfg).size(); });
}

mindiv_status mindiv_backtest_run(const mindiv_panel* panel, const mindiv_backtest_config* cfg,
                                  mindiv_backtest_results** out) {
    if (!panel || !cfg || !out) return invalid("null argument");
    return guarded([&] {
        *out = new mindiv_backtest_results{run_backtest(panel->panel, cfg->cfg), {}};
    });
}
void mindiv_backtest_results_free(mindiv_backtest_results* results) { delete results; }

size_t mindiv_backtest_result_count(const mindiv_backtest_results* results) {
    return results ? results->rows.size() : 0;
}

mindiv_status mindiv_backtest_result_row(const mindiv_backtest_results* results, size_t index,
                                         size_t* bucket, const char** strategy,
                                         double* oos_skewness, double* oos_excess_kurtosis,
                                         int* high_vol, double* weights_out,
                                         size_t weights_capacity) {
    if (!results) return invalid("null results");
    if (index >= results->rows.size()) return invalid("result index out of range");
    const auto& row = results->rows[index];
    if (bucket) *bucket = row.bucket;
    if (strategy) *strategy = row.strategy.c_str();
    if (oos_skewness) *oos_skewness = row.oos_skewness;
    if (oos_excess_kurtosis) *oos_excess_kurtosis = row.oos_excess_kurtosis;
    if (high_vol) *high_vol = row.regime == vol_regime::high_vol ? 1 : 0;
    if (weights_out) {
        if (weights_capacity < row.allocation.w.size())
            return invalid("weights buffer too small");
        std::memcpy(weights_out, row.allocation.w.data(),
                    row.allocation.w.size() * sizeof(double));
    }
    return MINDIV_OK;
}

mindiv_status mindiv_backtest_high_vol_count(const mindiv_backtest_results* results,
                                             size_t* out) {
    if (!results || !out) return invalid("null argument");
    size_t buckets = 0;
    for (const auto& r : results->rows) buckets = std::max(buckets, r.bucket + 1);
    size_t count = 0;
    std::vector<char> seen(buckets, 0);
    for (const auto& r : results->rows) {
        if (r.regime == vol_regime::high_vol && !seen[r.bucket]) {
            seen[r.bucket] = 1;
            ++count;
        }
    }
    *out = count;
    return MINDIV_OK;
}

mindiv_status mindiv_winner_counts(const mindiv_backtest_results* results,
                                   const char* criterion, const char* regime,
                                   size_t* count_inout, const char** strategies_out,
                                   size_t* wins_out) {
    if (!results || !criterion || !regime || !count_inout) return invalid("null argument");
    return guarded([&] {
        const std::string c(criterion);
        winner_criterion wc;
        if (c == "min_kurtosis") {
            wc = winner_criterion::min_kurtosis;
        } else if (c == "max_skewness") {
            wc = winner_criterion::max_skewness;
        } else {
            fail(errc::invalid_argument, "criterion must be min_kurtosis or max_skewness");
        }
        const std::string r(regime);
        regime_filter rf;
        if (r == "all") {
            rf = regime_filter::all;
        } else if (r == "low") {
            rf = regime_filter::low_only;
        } else if (r == "high") {
            rf = regime_filter::high_only;
        } else {
            fail(errc::invalid_argument, "regime must be all, low or high");
        }
        auto* self = const_cast<mindiv_backtest_results*>(results);
        self->scratch_winners = winner_counts(results->rows, wc, rf);
        if (strategies_out && wins_out) {
            const size_t n = std::min(*count_inout, self->scratch_winners.size());
            for (size_t i = 0; i < n; ++i) {
                strategies_out[i] = self->scratch_winners[i].strategy.c_str();
                wins_out[i] = self->scratch_winners[i].buckets_won;
            }
        }
        *count_inout = self->scratch_winners.size();
    });
}

} /* extern "C" */
