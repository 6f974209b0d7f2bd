#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "oracle.hpp"
#include "targets.hpp"

using namespace mindiv;

namespace {

const target_spec kFamilies[] = {
    target_spec::gaussian(0.3, 0.8),
    target_spec::generalized_normal(0.1, 0.7, 4.0),
    target_spec::generalized_normal(-0.2, 0.5, 1.5),
    target_spec::skew_gaussian(1.0, 0.2, 0.6),
    target_spec::skew_gaussian(-2.0, -0.5, 1.4),
    target_spec::beta_dist(2.0, 5.0),
    target_spec::beta_dist(0.6, 0.8),
    target_spec::uniform(),
};

void support(const target_spec& t, double* lo, double* hi) {
    if (t.bounded_support()) {
        *lo = 0.0;
        *hi = 1.0;
        return;
    }
    const auto mm = moments(t);
    const double spread = 14.0 * std::sqrt(mm.variance);
    *lo = mm.mean - spread;
    *hi = mm.mean + spread;
}

double oracle_moment(const target_spec& t, int order, double center) {
    double lo, hi;
    support(t, &lo, &hi);
    auto f = [&](double x) { return std::pow(x - center, order) * pdf(t, x); };
    if (t.bounded_support()) {
        // Beta densities can be singular at the endpoints.
        const double a = t.family == target_family::beta ? t.alpha - 1.0 : 0.0;
        const double b = t.family == target_family::beta ? t.beta - 1.0 : 0.0;
        return oracle::integrate_beta_weighted(
            a, b, [&](double x) { return std::pow(x - center, order) * pdf(t, x) /
                                         (std::pow(x, a) * std::pow(1.0 - x, b)); },
            0.0, 1.0);
    }
    return oracle::integrate_adaptive(f, lo, hi, 1e-12);
}

// Batch-based standard error of a sample statistic.
double batch_se(const std::vector<double>& xs, const std::function<double(const double*, std::size_t)>& stat,
                std::size_t batches) {
    const std::size_t per = xs.size() / batches;
    std::vector<double> vals(batches);
    for (std::size_t b = 0; b < batches; ++b) vals[b] = stat(xs.data() + b * per, per);
    double m = 0.0;
    for (double v : vals) m += v;
    m /= static_cast<double>(batches);
    double var = 0.0;
    for (double v : vals) var += (v - m) * (v - m);
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

} // namespace

TEST_CASE("pdf hand values") {
    CHECK(pdf(target_spec::gaussian(0, 1), 0.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(pdf(target_spec::beta_dist(1, 1), 0.5) == doctest::Approx(1.0));
    CHECK(pdf(target_spec::skew_gaussian(0.0, 0.0, 1.0), 0.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(pdf(target_spec::beta_dist(2, 2), -0.1) == 0.0);
    CHECK(pdf(target_spec::uniform(), 1.5) == 0.0);
}

TEST_CASE("pdf integrates to one") {
    for (const auto& t : kFamilies) {
        CHECK(oracle_moment(t, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("score hand values") {
    CHECK(score(target_spec::gaussian(1.0, 2.0), 0.0) == doctest::Approx(0.25));
    CHECK(score(target_spec::beta_dist(2, 2), 0.5) == doctest::Approx(0.0));
    CHECK(score(target_spec::generalized_normal(0.0, 1.0, 2.0), 1.0) ==
          doctest::Approx(-1.0));
}

TEST_CASE("score matches finite differences of log pdf") {
    for (const auto& t : kFamilies) {
        double lo, hi;
        support(t, &lo, &hi);
        if (t.bounded_support()) {
            lo = 0.02;
            hi = 0.98;
        } else {
            lo += 0.1;
            hi -= 0.1;
        }
        for (int i = 0; i < 50; ++i) {
            const double x = lo + (hi - lo) * (i + 0.5) / 50.0;
            if (t.family == target_family::generalized_normal && std::fabs(x - t.alpha) < 2e-2)
                continue; // kink for gamma < 2
            const double fd =
                oracle::fd_derivative([&](double u) { return log_pdf(t, u); }, x, 1e-6);
            CHECK(score(t, x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("score domain errors") {
    CHECK_THROWS_AS(score(target_spec::beta_dist(2, 3), 1.2), error);
    CHECK_THROWS_AS(score(target_spec::uniform(), -0.5), error);
    CHECK_THROWS_AS(score(target_spec::generalized_normal(0.5, 1.0, 1.0), 0.5), error);
    CHECK(score(target_spec::generalized_normal(0.5, 1.0, 3.0), 0.5) == 0.0);
}

TEST_CASE("analytic moments match quadrature of the density") {
    for (const auto& t : kFamilies) {
        const auto mm = moments(t);
        const double mean = oracle_moment(t, 1, 0.0);
        CHECK(mm.mean == doctest::Approx(mean).epsilon(1e-7));
        const double var = oracle_moment(t, 2, mean);
        CHECK(mm.variance == doctest::Approx(var).epsilon(1e-7));
        const double skew = oracle_moment(t, 3, mean) / std::pow(var, 1.5);
        CHECK(mm.skewness == doctest::Approx(skew).epsilon(1e-6));
        const double kurt = oracle_moment(t, 4, mean) / (var * var) - 3.0;
        CHECK(mm.excess_kurtosis == doctest::Approx(kurt).epsilon(2e-6));
    }
}

TEST_CASE("named moment values") {
    const auto sg = moments(target_spec::skew_gaussian(1.0, 0.0, 1.0));
    CHECK(sg.excess_kurtosis == doctest::Approx(0.0617).epsilon(1e-2));
    const auto g = moments(target_spec::gaussian(0.4, 1.7));
    CHECK(g.mean == 0.4);
    CHECK(g.variance == doctest::Approx(1.7 * 1.7));
    CHECK(g.skewness == 0.0);
    CHECK(g.excess_kurtosis == 0.0);
    const auto gn4 = moments(target_spec::generalized_normal(0.0, 1.0, 4.0));
    CHECK(gn4.excess_kurtosis < 0.0);
}

TEST_CASE("sampling matches analytic moments at monte carlo accuracy") {
    const std::size_t n = 1000000;
    for (const auto& t : kFamilies) {
        const auto xs = sample(t, n, 42);
        const auto mm = moments(t);

        auto mean_stat = [](const double* p, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += p[i];
            return s / static_cast<double>(m);
        };
        const double mean = mean_stat(xs.data(), n);
        CHECK(std::fabs(mean - mm.mean) <= 6.0 * batch_se(xs, mean_stat, 100));

        auto var_stat = [mean](const double* p, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += (p[i] - mean) * (p[i] - mean);
            return s / static_cast<double>(m);
        };
        const double var = var_stat(xs.data(), n);
        CHECK(std::fabs(var - mm.variance) <= 6.0 * batch_se(xs, var_stat, 100));

        const double sd = std::sqrt(var);
        auto skew_stat = [mean, sd](const double* p, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double z = (p[i] - mean) / sd;
                s += z * z * z;
            }
            return s / static_cast<double>(m);
        };
        CHECK(std::fabs(skew_stat(xs.data(), n) - mm.skewness) <=
              6.0 * batch_se(xs, skew_stat, 100));

        auto kurt_stat = [mean, sd](const double* p, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double z = (p[i] - mean) / sd;
                s += z * z * z * z;
            }
            return s / static_cast<double>(m) - 3.0;
        };
        CHECK(std::fabs(kurt_stat(xs.data(), n) - mm.excess_kurtosis) <=
              6.0 * batch_se(xs, kurt_stat, 100));
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const auto a = sample(target_spec::uniform(), 3, 99);
    const auto b = sample(target_spec::uniform(), 3, 99);
    CHECK(a == b);
    const auto c = sample(target_spec::uniform(), 3, 100);
    CHECK(a != c);
}

TEST_CASE("inverse cdf hand values and round trip") {
    CHECK(inverse_cdf(target_spec::gaussian(0, 1), 0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(inverse_cdf(target_spec::uniform(), 0.37) == doctest::Approx(0.37));
    for (const auto& t : kFamilies) {
        double prev = -1e308;
        for (double u : {0.001, 0.05, 0.25, 0.5, 0.7, 0.9, 0.975, 0.999}) {
            const double x = inverse_cdf(t, u);
            CHECK(x >= prev); // monotone
            prev = x;
            CHECK(cdf(t, x) == doctest::Approx(u).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(inverse_cdf(target_spec::gaussian(0, 1), 0.0), error);
    CHECK_THROWS_AS(inverse_cdf(target_spec::gaussian(0, 1), 1.0), error);
}

TEST_CASE("generalized normal quantile agrees with a quadrature-cdf bisection") {
    const auto t = target_spec::generalized_normal(0.0, 1.0, 4.0);
    const double u = 0.975;
    // Reference: bisection on the numerically integrated density.
    auto oracle_cdf = [&](double x) {
        return 0.5 + oracle::integrate_adaptive([&](double y) { return pdf(t, y); },
                                                0.0, x, 1e-13);
    };
    double lo = 0.0, hi = 5.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle_cdf(mid) < u ? lo : hi) = mid;
    }
    CHECK(inverse_cdf(t, u) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
}

TEST_CASE("beta moment matching") {
    const auto b1 = beta_from_moments(0.5, 0.05);
    CHECK(b1.alpha == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b1.beta == doctest::Approx(2.0).epsilon(1e-12));
    const auto b2 = beta_from_moments(0.5, 1.0 / 12.0);
    CHECK(b2.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b2.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(beta_from_moments(0.3, 0.25), error);
    // round trip through the analytic moments
    for (double mean : {0.2, 0.5, 0.8}) {
        for (double var : {0.01, 0.05}) {
            const auto t = beta_from_moments(mean, var);
            const auto mm = moments(t);
            CHECK(mm.mean == doctest::Approx(mean).epsilon(1e-10));
            CHECK(mm.variance == doctest::Approx(var).epsilon(1e-10));
        }
    }
}

TEST_CASE("relocation keeps the family shape and hits the requested moments") {
    const target_spec shapes[] = {
        target_spec::gaussian(0, 1),
        target_spec::generalized_normal(0, 1, 4.0),
        target_spec::skew_gaussian(1.0, 0, 1),
    };
    for (const auto& shape : shapes) {
        const auto t = with_moments(shape, 0.02, 0.14);
        const auto mm = moments(t);
        CHECK(mm.mean == doctest::Approx(0.02).epsilon(1e-10));
        CHECK(std::sqrt(mm.variance) == doctest::Approx(0.14).epsilon(1e-10));
    }
    CHECK_THROWS_AS(with_moments(target_spec::uniform(), 0.5, 0.1), error);
}
