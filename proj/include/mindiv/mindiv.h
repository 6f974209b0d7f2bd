/*
 * mindiv - minimum-divergence portfolio construction.
 *
 * C interface over the core library: opaque handles, integer status codes,
 * and a thread-local error message. All functions return MINDIV_OK on
 * success; on failure the out-parameters are left untouched and
 * mindiv_last_error() describes the problem.
 */
#ifndef MINDIV_H
#define MINDIV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mindiv_status {
    MINDIV_OK = 0,
    MINDIV_ERR_INVALID_ARGUMENT,
    MINDIV_ERR_UNSUPPORTED_KERNEL,
    MINDIV_ERR_UNSUPPORTED_PAIR,
    MINDIV_ERR_DIVERGENT_PARAMETER,
    MINDIV_ERR_OUT_OF_SUPPORT,
    MINDIV_ERR_DOMAIN,
    MINDIV_ERR_INFEASIBLE,
    MINDIV_ERR_INSUFFICIENT_SAMPLES,
    MINDIV_ERR_TRUNCATION_FAILURE,
    MINDIV_ERR_NO_LOCATIONS,
    MINDIV_ERR_PARSE,
    MINDIV_ERR_MISSING_CELL,
    MINDIV_ERR_NON_MONOTONE_DATES,
    MINDIV_ERR_PANEL_TOO_SHORT,
    MINDIV_ERR_SINGULAR_COVARIANCE,
    MINDIV_ERR_UNKNOWN_EXPERIMENT,
    MINDIV_ERR_IO,
    MINDIV_ERR_INTERNAL
} mindiv_status;

const char* mindiv_status_name(mindiv_status status);

/* Message for the most recent failure on this thread. */
const char* mindiv_last_error(void);

/* Caps worker threads used by quadratic estimators; 0 restores the default. */
void mindiv_set_threads(unsigned n);

/* ------------------------------------------------------------------ */
/* Kernels                                                             */
/* ------------------------------------------------------------------ */

typedef struct mindiv_kernel mindiv_kernel;

mindiv_status mindiv_kernel_create_gaussian(double c, mindiv_kernel** out);
mindiv_status mindiv_kernel_create_laplacian(double lambda, mindiv_kernel** out);
mindiv_status mindiv_kernel_create_exponential(double b, mindiv_kernel** out);
mindiv_status mindiv_kernel_create_gaussian_exponentiated(double a, double b,
                                                          mindiv_kernel** out);
mindiv_status mindiv_kernel_create_matern(double sigma0, double sigma, int p,
                                          mindiv_kernel** out);
void mindiv_kernel_free(mindiv_kernel* kernel);

mindiv_status mindiv_kernel_eval(const mindiv_kernel* kernel, double x, double y, double* out);
mindiv_status mindiv_kernel_dx(const mindiv_kernel* kernel, double x, double y, double* out);
mindiv_status mindiv_kernel_dxdy(const mindiv_kernel* kernel, double x, double y, double* out);

/* ------------------------------------------------------------------ */
/* Target distributions                                                */
/* ------------------------------------------------------------------ */

typedef struct mindiv_target mindiv_target;

mindiv_status mindiv_target_create_gaussian(double m, double sigma, mindiv_target** out);
mindiv_status mindiv_target_create_generalized_normal(double alpha, double beta, double gamma,
                                                      mindiv_target** out);
mindiv_status mindiv_target_create_skew_gaussian(double s, double m, double v,
                                                 mindiv_target** out);
mindiv_status mindiv_target_create_beta(double alpha, double beta, mindiv_target** out);
mindiv_status mindiv_target_create_uniform(mindiv_target** out);
mindiv_status mindiv_target_from_moments(const mindiv_target* shape, double mean, double stddev,
                                         mindiv_target** out);
mindiv_status mindiv_beta_from_moments(double mean, double variance, mindiv_target** out);
void mindiv_target_free(mindiv_target* target);

mindiv_status mindiv_target_pdf(const mindiv_target* target, double x, double* out);
mindiv_status mindiv_target_score(const mindiv_target* target, double x, double* out);
mindiv_status mindiv_target_cdf(const mindiv_target* target, double x, double* out);
mindiv_status mindiv_target_inverse_cdf(const mindiv_target* target, double u, double* out);

/* mean, variance, skewness, excess kurtosis */
mindiv_status mindiv_target_moments(const mindiv_target* target, double* mean, double* variance,
                                    double* skewness, double* excess_kurtosis);

/* Fills out[0..n-1] with i.i.d. draws; deterministic for a given seed. */
mindiv_status mindiv_target_sample(const mindiv_target* target, size_t n, uint64_t seed,
                                   double* out);

/* ------------------------------------------------------------------ */
/* Analytic mean embeddings                                            */
/* ------------------------------------------------------------------ */

/* truncation_order <= 0 selects the order from the series tail bound. */
mindiv_status mindiv_mean_embedding(const mindiv_target* target, const mindiv_kernel* kernel,
                                    int truncation_order, double x, double* out);

mindiv_status mindiv_double_expectation(const mindiv_target* target,
                                        const mindiv_kernel* kernel, double tol, double* out);

/* Truncated series values with their tail envelopes. */
mindiv_status mindiv_e1(double lambda, double z, double a, double b, int terms, double* value,
                        double* bound);
mindiv_status mindiv_e2(double lambda, double z, double a, double b, int terms, double* value,
                        double* bound);
mindiv_status mindiv_choose_truncation(double lambda, double a, double b, double z, double tol,
                                       int* out);

/* ------------------------------------------------------------------ */
/* Divergence estimators                                               */
/* ------------------------------------------------------------------ */

typedef struct mindiv_divergence mindiv_divergence;

/*
 * kind is one of: "mmd_two_sample_u", "mmd_two_sample_v",
 * "mmd_semi_explicit_u", "mmd_semi_explicit_v", "ksd_v", "ksd_u", "fssd",
 * "wasserstein", "kl_gaussian". kernel may be NULL for the kinds that do
 * not use one.
 */
mindiv_status mindiv_divergence_create(const char* kind, const mindiv_kernel* kernel,
                                       const mindiv_target* target, mindiv_divergence** out);
void mindiv_divergence_free(mindiv_divergence* divergence);

mindiv_status mindiv_divergence_set_wad_p(mindiv_divergence* divergence, double p);
mindiv_status mindiv_divergence_set_fssd_locations(mindiv_divergence* divergence,
                                                   const double* locations, size_t count);
mindiv_status mindiv_divergence_set_target_sample_size(mindiv_divergence* divergence, size_t m);
mindiv_status mindiv_divergence_set_drop_constant_term(mindiv_divergence* divergence,
                                                       int drop);
/* rule: "fixed" or "sample_std" */
mindiv_status mindiv_divergence_set_bandwidth_rule(mindiv_divergence* divergence,
                                                   const char* rule);
mindiv_status mindiv_divergence_set_truncation_order(mindiv_divergence* divergence, int order);

typedef struct mindiv_estimate_result {
    double value;
    size_t n_samples;
    size_t m_samples;
    int constant_term_included;
} mindiv_estimate_result;

/* ys may be NULL; two-sample kinds then draw from the target with seed. */
mindiv_status mindiv_divergence_estimate(const mindiv_divergence* divergence, const double* xs,
                                         size_t n, const double* ys, size_t m, uint64_t seed,
                                         mindiv_estimate_result* out);

/* Stein kernel value h(x, y) for the divergence's kernel/target. */
mindiv_status mindiv_stein_kernel(const mindiv_kernel* kernel, const mindiv_target* target,
                                  double x, double y, double* out);

/* ------------------------------------------------------------------ */
/* Cross-entropy optimizer                                             */
/* ------------------------------------------------------------------ */

typedef struct mindiv_cem_config {
    double rho;           /* elite quantile parameter, default 0.1 */
    double beta_smooth;   /* smoothing weight, default 0.7 */
    int samples_per_iter; /* default 200 */
    int iterations;       /* default 50 */
    uint64_t seed;
    double sigma_floor;         /* default 1e-8 */
    const double* init_mean;    /* optional, d-1 entries */
    const double* init_cov;     /* optional, (d-1)^2 row-major */
} mindiv_cem_config;

void mindiv_cem_config_defaults(mindiv_cem_config* cfg);

/* Objective callback: fill *value with the score of w (to be maximized) and
 * return 0, or return nonzero to abort the optimization. */
typedef int (*mindiv_objective_fn)(void* context, const double* w, size_t dim, double* value);

typedef struct mindiv_cem_trace mindiv_cem_trace;

mindiv_status mindiv_cem_optimize(mindiv_objective_fn objective, void* context, size_t dim,
                                  const mindiv_cem_config* cfg, double* weights_out,
                                  double* best_value_out, mindiv_cem_trace** trace_out);

size_t mindiv_cem_trace_length(const mindiv_cem_trace* trace);
mindiv_status mindiv_cem_trace_row(const mindiv_cem_trace* trace, size_t index, int* iteration,
                                   double* gamma, int* elite_count, double* mean_out,
                                   double* cov_diag_out);
void mindiv_cem_trace_free(mindiv_cem_trace* trace);

/* One Dirichlet draw on the simplex. */
mindiv_status mindiv_dirichlet_sample(const double* concentration, size_t dim, uint64_t seed,
                                      double* weights_out);

/* Minimizes the divergence of w . r over the budget hyperplane. */
mindiv_status mindiv_portfolio_optimize(const mindiv_divergence* divergence,
                                        const double* returns, size_t rows, size_t dim,
                                        const mindiv_cem_config* cfg, uint64_t seed,
                                        double* weights_out, mindiv_cem_trace** trace_out);

/* ------------------------------------------------------------------ */
/* Returns panels and the rolling backtest                             */
/* ------------------------------------------------------------------ */

typedef struct mindiv_panel mindiv_panel;

mindiv_status mindiv_panel_read_csv(const char* path, int percent_units, mindiv_panel** out);
void mindiv_panel_free(mindiv_panel* panel);

size_t mindiv_panel_rows(const mindiv_panel* panel);
size_t mindiv_panel_cols(const mindiv_panel* panel);
mindiv_status mindiv_panel_value(const mindiv_panel* panel, size_t row, size_t col,
                                 double* out);
const char* mindiv_panel_date(const mindiv_panel* panel, size_t row);
const char* mindiv_panel_asset(const mindiv_panel* panel, size_t col);

typedef struct mindiv_backtest_config mindiv_backtest_config;
typedef struct mindiv_backtest_results mindiv_backtest_results;

mindiv_status mindiv_backtest_config_create(mindiv_backtest_config** out);
void mindiv_backtest_config_free(mindiv_backtest_config* cfg);

mindiv_status mindiv_backtest_set_windows(mindiv_backtest_config* cfg, size_t estimation,
                                          size_t evaluation);
mindiv_status mindiv_backtest_set_regime_multiplier(mindiv_backtest_config* cfg,
                                                    double multiplier);
mindiv_status mindiv_backtest_set_seed(mindiv_backtest_config* cfg, uint64_t seed);
mindiv_status mindiv_backtest_set_cem(mindiv_backtest_config* cfg,
                                      const mindiv_cem_config* cem);

/* Builtin rules: "equal_weight", "min_variance", "max_sharpe_bs". */
mindiv_status mindiv_backtest_add_builtin(mindiv_backtest_config* cfg, const char* name,
                                          const char* rule);
/*
 * Divergence strategy; the divergence handle is copied. With
 * relocate_target nonzero the target mean and deviation are refitted each
 * bucket from the in-sample maximum Sharpe ratio portfolio; zero keeps the
 * configured target unchanged.
 */
mindiv_status mindiv_backtest_add_strategy(mindiv_backtest_config* cfg, const char* name,
                                           const mindiv_divergence* divergence,
                                           int relocate_target);

mindiv_status mindiv_backtest_bucket_count(const mindiv_panel* panel,
                                           const mindiv_backtest_config* cfg, size_t* out);

mindiv_status mindiv_backtest_run(const mindiv_panel* panel, const mindiv_backtest_config* cfg,
                                  mindiv_backtest_results** out);
void mindiv_backtest_results_free(mindiv_backtest_results* results);

size_t mindiv_backtest_result_count(const mindiv_backtest_results* results);
mindiv_status mindiv_backtest_result_row(const mindiv_backtest_results* results, size_t index,
                                         size_t* bucket, const char** strategy,
                                         double* oos_skewness, double* oos_excess_kurtosis,
                                         int* high_vol, double* weights_out,
                                         size_t weights_capacity);
mindiv_status mindiv_backtest_high_vol_count(const mindiv_backtest_results* results,
                                             size_t* out);

/* criterion: "min_kurtosis" or "max_skewness"; regime: "all", "low", "high". */
mindiv_status mindiv_winner_counts(const mindiv_backtest_results* results,
                                   const char* criterion, const char* regime,
                                   size_t* count_inout, const char** strategies_out,
                                   size_t* wins_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MINDIV_H */
