#include "backtest.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

namespace mindiv {

namespace {

Eigen::VectorXd column_means(const returns_panel& panel, std::size_t lo, std::size_t hi) {
    const std::size_t d = panel.cols();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t r = lo; r < hi; ++r)
        for (std::size_t c = 0; c < d; ++c) mu(static_cast<Eigen::Index>(c)) += panel.at(r, c);
    mu /= static_cast<double>(hi - lo);
    return mu;
}

Eigen::MatrixXd sample_covariance(const returns_panel& panel, std::size_t lo, std::size_t hi) {
    const std::size_t d = panel.cols();
    const Eigen::VectorXd mu = column_means(panel, lo, hi);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
    Eigen::VectorXd row(static_cast<Eigen::Index>(d));
    for (std::size_t r = lo; r < hi; ++r) {
        for (std::size_t c = 0; c < d; ++c)
            row(static_cast<Eigen::Index>(c)) = panel.at(r, c) - mu(static_cast<Eigen::Index>(c));
        cov += row * row.transpose();
    }
    cov /= static_cast<double>(hi - lo);
    return cov;
}

// Solves cov x = rhs, retrying once with a small ridge.
Eigen::VectorXd solve_spd(Eigen::MatrixXd cov, const Eigen::VectorXd& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov += 1e-8 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
        llt.compute(cov);
        require(llt.info() == Eigen::Success, errc::singular_covariance,
                "covariance matrix is singular even after ridge regularization");
    }
    return llt.solve(rhs);
}

weights normalize_budget(const Eigen::VectorXd& direction) {
    const double total = direction.sum();
    require(std::fabs(total) > 1e-12, errc::singular_covariance,
            "portfolio direction has no budget exposure");
    std::vector<double> head(static_cast<std::size_t>(direction.size()) - 1);
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(direction.size()); ++i)
        head[i] = direction(static_cast<Eigen::Index>(i)) / total;
    return weights::complete(head);
}

double population_variance(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return v / static_cast<double>(xs.size());
}

} // namespace

void backtest_config::validate() const {
    require(evaluation_window >= 20, errc::invalid_argument,
            "evaluation window must be at least 20 days");
    require(estimation_window >= evaluation_window, errc::invalid_argument,
            "estimation window must cover at least one evaluation window");
    require(regime_multiplier > 0.0, errc::invalid_argument,
            "regime multiplier must be positive");
    require(!strategies.empty(), errc::invalid_argument, "backtest needs at least one strategy");
    for (const auto& s : strategies) {
        if (s.kind == strategy_spec::rule::divergence) {
            require(s.divergence.has_value(), errc::invalid_argument,
                    "divergence strategy '" + s.name + "' needs a divergence config");
            s.divergence->validate();
        }
    }
}

std::vector<bucket_range> make_buckets(const returns_panel& panel, const backtest_config& cfg) {
    const std::size_t est = cfg.estimation_window;
    const std::size_t ev = cfg.evaluation_window;
    require(panel.rows() >= est + ev, errc::panel_too_short,
            "panel has " + std::to_string(panel.rows()) + " rows; needs at least " +
                std::to_string(est + ev));
    const std::size_t count = (panel.rows() - est) / ev;
    std::vector<bucket_range> out(count);
    for (std::size_t b = 0; b < count; ++b) {
        out[b].evaluation_begin = est + b * ev;
        out[b].evaluation_end = est + (b + 1) * ev;
        out[b].estimation_begin = out[b].evaluation_begin - est;
        out[b].estimation_end = out[b].evaluation_begin;
    }
    return out;
}

std::vector<vol_regime> label_regimes(const returns_panel& panel, const backtest_config& cfg) {
    const auto buckets = make_buckets(panel, cfg);
    const std::size_t d = panel.cols();

    auto window_avg_variance = [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        std::vector<double> col(hi - lo);
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t r = lo; r < hi; ++r) col[r - lo] = panel.at(r, c);
            acc += population_variance(col);
        }
        return acc / static_cast<double>(d);
    };

    const double long_term = window_avg_variance(0, panel.rows());
    std::vector<vol_regime> out(buckets.size());
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        const double win =
            window_avg_variance(buckets[b].evaluation_begin, buckets[b].evaluation_end);
        out[b] = win > cfg.regime_multiplier * long_term ? vol_regime::high_vol
                                                         : vol_regime::low_vol;
    }
    return out;
}

weights min_variance_weights(const returns_panel& panel, std::size_t row_begin,
                             std::size_t row_end) {
    const Eigen::MatrixXd cov = sample_covariance(panel, row_begin, row_end);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cov.rows());
    return normalize_budget(solve_spd(cov, ones));
}

weights max_sharpe_bayes_stein_weights(const returns_panel& panel, std::size_t row_begin,
                                       std::size_t row_end,
                                       std::optional<double> forced_intensity) {
    const auto d = static_cast<Eigen::Index>(panel.cols());
    const double t_obs = static_cast<double>(row_end - row_begin);
    const Eigen::MatrixXd cov = sample_covariance(panel, row_begin, row_end);
    const Eigen::VectorXd mu = column_means(panel, row_begin, row_end);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);

    const Eigen::VectorXd cov_inv_ones = solve_spd(cov, ones);
    const double mv_mean = mu.dot(cov_inv_ones) / ones.dot(cov_inv_ones);

    double intensity;
    if (forced_intensity) {
        intensity = *forced_intensity;
    } else {
        const Eigen::VectorXd excess = mu - mv_mean * ones;
        const double mahal = excess.dot(solve_spd(cov, excess));
        const double dd = static_cast<double>(d);
        intensity = (dd + 2.0) / ((dd + 2.0) + t_obs * std::max(mahal, 0.0));
    }
    const Eigen::VectorXd shrunk = (1.0 - intensity) * mu + intensity * mv_mean * ones;
    return normalize_budget(solve_spd(cov, shrunk));
}

std::vector<double> portfolio_returns(const returns_panel& panel, const weights& w,
                                      std::size_t row_begin, std::size_t row_end) {
    const std::size_t d = panel.cols();
    require(w.w.size() == d, errc::invalid_argument, "weight dimension does not match panel");
    std::vector<double> out(row_end - row_begin);
    for (std::size_t r = row_begin; r < row_end; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += w.w[c] * panel.at(r, c);
        out[r - row_begin] = acc;
    }
    return out;
}

double standardized_skewness(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0, s3 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        v += d * d;
        s3 += d * d * d;
    }
    v /= static_cast<double>(xs.size());
    s3 /= static_cast<double>(xs.size());
    if (v <= 0.0) return 0.0;
    return s3 / std::pow(v, 1.5);
}

double standardized_excess_kurtosis(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        v += d * d;
        s4 += d * d * d * d;
    }
    v /= static_cast<double>(xs.size());
    s4 /= static_cast<double>(xs.size());
    if (v <= 0.0) return 0.0;
    return s4 / (v * v) - 3.0;
}

namespace {

weights equal_weights(std::size_t d) {
    std::vector<double> head(d - 1, 1.0 / static_cast<double>(d));
    return weights::complete(head);
}

// Fits one divergence strategy on the estimation window.
weights fit_divergence_strategy(const returns_panel& panel, const bucket_range& bucket,
                                const backtest_config& cfg, const strategy_spec& strat,
                                double target_mean, double target_sd, std::uint64_t seed) {
    divergence_config live = *strat.divergence;
    if (strat.relocate_target && live.target.family != target_family::uniform) {
        live.target = with_moments(live.target, target_mean, target_sd);
    }

    const std::size_t d = panel.cols();
    const bool two_sample = live.kind == divergence_kind::mmd_two_sample_u ||
                            live.kind == divergence_kind::mmd_two_sample_v;
    std::vector<double> target_draws;
    if (two_sample) {
        target_draws = sample(live.target, live.target_sample_size, derive_seed(seed, 1));
    }
    if (live.kind == divergence_kind::fssd && live.fssd_locations.empty()) {
        // Witness locations are fixed for the whole optimization run, drawn
        // from a gaussian fitted to the equal-weight in-sample portfolio.
        const auto base = portfolio_returns(panel, equal_weights(d), bucket.estimation_begin,
                                            bucket.estimation_end);
        const double m = std::accumulate(base.begin(), base.end(), 0.0) /
                         static_cast<double>(base.size());
        const double sd = std::sqrt(std::max(population_variance(base), 1e-24));
        live.fssd_locations = sample(target_spec::gaussian(m, sd), 5, derive_seed(seed, 2));
    }

    auto objective = [&](const weights& w) {
        const auto xs =
            portfolio_returns(panel, w, bucket.estimation_begin, bucket.estimation_end);
        const auto est = estimate(live, xs, target_draws, derive_seed(seed, 3));
        return -est.value;
    };

    cem_config cem = cfg.cem;
    cem.seed = derive_seed(seed, 4);
    return cem_optimize(objective, static_cast<int>(d), cem).optimum;
}

} // namespace

std::vector<bucket_result> run_backtest(const returns_panel& panel, const backtest_config& cfg) {
    panel.validate();
    cfg.validate();
    const auto buckets = make_buckets(panel, cfg);
    const auto regimes = label_regimes(panel, cfg);
    std::vector<bucket_result> results;
    results.reserve(buckets.size() * cfg.strategies.size());

    for (std::size_t b = 0; b < buckets.size(); ++b) {
        const auto& bk = buckets[b];
        const weights mv = min_variance_weights(panel, bk.estimation_begin, bk.estimation_end);
        const weights msr =
            max_sharpe_bayes_stein_weights(panel, bk.estimation_begin, bk.estimation_end);

        // Target location and scale for the divergence strategies come from
        // the in-sample maximum Sharpe ratio portfolio.
        const auto msr_returns =
            portfolio_returns(panel, msr, bk.estimation_begin, bk.estimation_end);
        const double target_mean = std::accumulate(msr_returns.begin(), msr_returns.end(), 0.0) /
                                   static_cast<double>(msr_returns.size());
        const double target_sd = std::sqrt(std::max(population_variance(msr_returns), 1e-24));

        for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
            const auto& strat = cfg.strategies[si];
            weights w;
            switch (strat.kind) {
                case strategy_spec::rule::equal_weight: w = equal_weights(panel.cols()); break;
                case strategy_spec::rule::min_variance: w = mv; break;
                case strategy_spec::rule::max_sharpe_bs: w = msr; break;
                case strategy_spec::rule::divergence:
                    w = fit_divergence_strategy(panel, bk, cfg, strat, target_mean, target_sd,
                                                derive_seed(cfg.seed, b * 1024 + si));
                    break;
            }
            const auto oos = portfolio_returns(panel, w, bk.evaluation_begin, bk.evaluation_end);
            bucket_result rec;
            rec.bucket = b;
            rec.strategy = strat.name;
            rec.allocation = w;
            rec.oos_skewness = standardized_skewness(oos);
            rec.oos_excess_kurtosis = standardized_excess_kurtosis(oos);
            rec.regime = regimes[b];
            results.push_back(std::move(rec));
        }
    }
    return results;
}

std::vector<winner_count> winner_counts(const std::vector<bucket_result>& results,
                                        winner_criterion criterion, regime_filter filter) {
    require(!results.empty(), errc::invalid_argument, "winner counts need at least one result");
    std::vector<std::string> strategies;
    std::size_t n_buckets = 0;
    for (const auto& r : results) {
        if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end())
            strategies.push_back(r.strategy);
        n_buckets = std::max(n_buckets, r.bucket + 1);
    }
    std::vector<winner_count> out;
    for (const auto& s : strategies) out.push_back({s, 0});

    for (std::size_t b = 0; b < n_buckets; ++b) {
        double best = 0.0;
        bool seen = false;
        for (const auto& r : results) {
            if (r.bucket != b) continue;
            if (filter == regime_filter::low_only && r.regime != vol_regime::low_vol) continue;
            if (filter == regime_filter::high_only && r.regime != vol_regime::high_vol) continue;
            const double score = criterion == winner_criterion::min_kurtosis
                                     ? -r.oos_excess_kurtosis
                                     : r.oos_skewness;
            if (!seen || score > best) {
                best = score;
                seen = true;
            }
        }
        if (!seen) continue;
        for (const auto& r : results) {
            if (r.bucket != b) continue;
            if (filter == regime_filter::low_only && r.regime != vol_regime::low_vol) continue;
            if (filter == regime_filter::high_only && r.regime != vol_regime::high_vol) continue;
            const double score = criterion == winner_criterion::min_kurtosis
                                     ? -r.oos_excess_kurtosis
                                     : r.oos_skewness;
            if (score == best) {
                for (auto& wc : out) {
                    if (wc.strategy == r.strategy) {
                        ++wc.buckets_won;
                        break;
                    }
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const winner_count& a, const winner_count& b) {
        return a.buckets_won > b.buckets_won;
    });
    return out;
}

} // namespace mindiv
