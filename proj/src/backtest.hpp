#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cem.hpp"
#include "divergences.hpp"
#include "panel.hpp"

namespace mindiv {

enum class vol_regime { low_vol, high_vol };
enum class winner_criterion { min_kurtosis, max_skewness };
enum class regime_filter { all, low_only, high_only };

// One rebalancing strategy: a builtin rule or a divergence objective
// minimized with the cross-entropy method. Divergence targets are relocated
// each bucket to the in-sample maximum Sharpe ratio mean and deviation.
struct strategy_spec {
    std::string name;
    enum class rule { equal_weight, min_variance, max_sharpe_bs, divergence } kind =
        rule::equal_weight;
    std::optional<divergence_config> divergence;
    // Relocated strategies take their target mean and deviation from the
    // in-sample maximum Sharpe ratio portfolio each bucket; fixed ones keep
    // the configured target as given.
    bool relocate_target = true;
};

struct backtest_config {
    std::size_t estimation_window = 1260;
    std::size_t evaluation_window = 126;
    double regime_multiplier = 1.5;
    std::vector<strategy_spec> strategies;
    cem_config cem;
    std::uint64_t seed = 0;

    void validate() const;
};

struct bucket_range {
    std::size_t estimation_begin = 0; // [begin, end)
    std::size_t estimation_end = 0;
    std::size_t evaluation_begin = 0;
    std::size_t evaluation_end = 0;
};

struct bucket_result {
    std::size_t bucket = 0;
    std::string strategy;
    weights allocation;
    double oos_skewness = 0.0;
    double oos_excess_kurtosis = 0.0;
    vol_regime regime = vol_regime::low_vol;
};

struct winner_count {
    std::string strategy;
    std::size_t buckets_won = 0;
};

// Consecutive non-overlapping evaluation windows, each preceded by the
// trailing estimation window.
std::vector<bucket_range> make_buckets(const returns_panel& panel, const backtest_config& cfg);

// High-volatility label when the evaluation window's average cross-asset
// variance exceeds multiplier times the full-panel average.
std::vector<vol_regime> label_regimes(const returns_panel& panel, const backtest_config& cfg);

weights min_variance_weights(const returns_panel& panel, std::size_t row_begin,
                             std::size_t row_end);

// Bayes-Stein shrinkage of the sample means toward the minimum variance
// portfolio mean, then the tangency direction. A forced intensity (0 for the
// plain tangency portfolio) overrides the estimated one.
weights max_sharpe_bayes_stein_weights(const returns_panel& panel, std::size_t row_begin,
                                       std::size_t row_end,
                                       std::optional<double> forced_intensity = std::nullopt);

std::vector<bucket_result> run_backtest(const returns_panel& panel, const backtest_config& cfg);

std::vector<winner_count> winner_counts(const std::vector<bucket_result>& results,
                                        winner_criterion criterion, regime_filter filter);

// Standardized third and fourth sample moments without bias correction.
double standardized_skewness(std::span<const double> xs);
double standardized_excess_kurtosis(std::span<const double> xs);

// Portfolio return series w . r_t over a row range.
std::vector<double> portfolio_returns(const returns_panel& panel, const weights& w,
                                      std::size_t row_begin, std::size_t row_end);

} // namespace mindiv
