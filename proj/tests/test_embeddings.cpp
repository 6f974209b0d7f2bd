#include <doctest.h>

#include <cmath>

#include "embeddings.hpp"
#include "errors.hpp"
#include "oracle.hpp"

using namespace mindiv;

namespace {

// Quadrature reference for the mean embedding: integral of k(x, y) q(y) dy.
double embedding_oracle(const target_spec& t, const kernel_spec& k, double x) {
    if (t.bounded_support()) {
        const double a = t.family == target_family::beta ? t.alpha - 1.0 : 0.0;
        const double b = t.family == target_family::beta ? t.beta - 1.0 : 0.0;
        const double norm =
            t.family == target_family::beta
                ? oracle::integrate_beta_weighted(a, b, [](double) { return 1.0; }, 0.0, 1.0)
                : 1.0;
        return oracle::integrate_beta_weighted(
                   a, b, [&](double y) { return kernel_eval(k, x, y); }, 0.0, 1.0) /
               norm;
    }
    const auto mm = moments(t);
    const double spread = 14.0 * std::sqrt(mm.variance);
    return oracle::integrate_adaptive(
        [&](double y) { return kernel_eval(k, x, y) * pdf(t, y); }, mm.mean - spread,
        mm.mean + spread, 1e-12);
}

double e1_oracle(double lambda, double z, double a, double b) {
    return oracle::integrate_beta_weighted(
        a, b, [lambda](double y) { return std::exp(lambda * y); }, 0.0, z);
}

double e2_oracle(double lambda, double z, double a, double b) {
    return oracle::integrate_beta_weighted(
        a, b, [lambda](double y) { return std::exp(-lambda * y); }, z, 1.0);
}

} // namespace

TEST_CASE("series values at hand-computable points") {
    const auto r0 = e1(0.0, 1.0, 0.0, 0.0, 0);
    CHECK(r0.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r0.bound == 0.0);

    const auto r1 = e1(1.0, 1.0, 0.0, 0.0, 20);
    CHECK(std::fabs(r1.value - (std::exp(1.0) - 1.0)) <= r1.bound);
    CHECK(r1.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

    const auto r2 = e2(2.0, 0.5, 0.5, 0.5, 30);
    CHECK(r2.value == doctest::Approx(e2_oracle(2.0, 0.5, 0.5, 0.5)).epsilon(1e-8));
}

TEST_CASE("series domain errors") {
    CHECK_THROWS_AS(e1(1.0, -0.1, 0.0, 0.0, 5), error);
    CHECK_THROWS_AS(e1(1.0, 0.5, -1.0, 0.0, 5), error);
    CHECK_THROWS_AS(e2(1.0, 0.5, 0.0, -1.5, 5), error);
    CHECK_THROWS_AS(e2(1.0, 1.5, 0.0, 0.0, 5), error);
}

TEST_CASE("truncation envelopes dominate the true error on the stress grid") {
    for (double lambda : {1.0, 5.0, 25.0}) {
        for (double z : {0.25, 0.5, 1.0}) {
            for (double ab : {-0.5, 0.0, 2.0}) {
                for (int terms : {choose_truncation(lambda, ab, ab, z, 1e-6),
                                  choose_truncation(lambda, ab, ab, z, 1e-10)}) {
                    const auto r1 = e1(lambda, z, ab, ab, terms);
                    const double t1 = e1_oracle(lambda, z, ab, ab);
                    CHECK(std::fabs(r1.value - t1) <= r1.bound + 1e-13 * std::fabs(t1));
                    const auto r2 = e2(lambda, z, ab, ab, terms);
                    const double t2 = e2_oracle(lambda, z, ab, ab);
                    CHECK(std::fabs(r2.value - t2) <= r2.bound + 1e-13 * (1.0 + std::fabs(t2)));
                }
            }
        }
    }
}

TEST_CASE("negative lambda series agree with quadrature") {
    for (double lambda : {-0.5, -3.0}) {
        for (double z : {0.3, 0.8}) {
            const auto r1 = e1(lambda, z, 0.5, -0.25, 40);
            CHECK(r1.value == doctest::Approx(e1_oracle(lambda, z, 0.5, -0.25)).epsilon(1e-10));
            const auto r2 = e2(lambda, z, -0.25, 0.5, 40);
            CHECK(r2.value == doctest::Approx(e2_oracle(lambda, z, -0.25, 0.5)).epsilon(1e-10));
        }
    }
}

TEST_CASE("truncation order selection") {
    CHECK(choose_truncation(0.0, 0.0, 0.0, 0.5, 1e-8) == 0);
    CHECK(choose_truncation(25.0, 0.0, 0.0, 1.0, 1e-8) >= 25);
    // tight tolerance: the realized error against quadrature obeys it
    const int k = choose_truncation(5.0, 0.0, 0.0, 1.0, 1e-12);
    const auto r = e1(5.0, 1.0, 0.0, 0.0, k);
    CHECK(std::fabs(r.value - e1_oracle(5.0, 1.0, 0.0, 0.0)) <= 1e-12 * (1.0 + r.value));
    CHECK_THROWS_AS(choose_truncation(600.0, 0.0, 0.0, 1.0, 1e-300), error);
}

TEST_CASE("mean embedding hand values") {
    embedding_pair gg{target_spec::gaussian(0, 1), kernel_spec::gaussian(1.0)};
    CHECK(mean_embedding(gg, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    embedding_pair bl{target_spec::beta_dist(1, 1), kernel_spec::laplacian(1.0)};
    CHECK(mean_embedding(bl, 0.5) ==
          doctest::Approx(2.0 * (1.0 - std::exp(-0.5))).epsilon(1e-10));

    // zero-skew target with matching variance reduces to the gaussian case
    embedding_pair sg{target_spec::skew_gaussian(0.0, 0.0, 1.0),
                      kernel_spec::gaussian_exponentiated(0.5, 0.0)};
    embedding_pair gg2{target_spec::gaussian(0, 1), kernel_spec::gaussian(1.0)};
    for (int i = 0; i <= 20; ++i) {
        const double x = -3.0 + 0.3 * i;
        CHECK(mean_embedding(sg, x) == doctest::Approx(mean_embedding(gg2, x)).epsilon(1e-12));
    }
}

TEST_CASE("mean embeddings agree with quadrature across all supported pairs") {
    struct case_t {
        target_spec t;
        kernel_spec k;
    };
    const case_t cases[] = {
        {target_spec::gaussian(0.3, 0.9), kernel_spec::gaussian(0.7)},
        {target_spec::gaussian(-0.2, 0.8), kernel_spec::exponential(0.5)},
        {target_spec::gaussian(0.1, 1.1), kernel_spec::gaussian_exponentiated(0.4, 0.3)},
        {target_spec::skew_gaussian(1.5, 0.2, 0.7), kernel_spec::gaussian(0.8)},
        {target_spec::beta_dist(2.0, 3.0), kernel_spec::laplacian(1.5)},
        {target_spec::beta_dist(0.7, 0.9), kernel_spec::laplacian(2.5)},
        {target_spec::beta_dist(2.5, 1.5), kernel_spec::matern(1.2, 0.8, 2)},
        {target_spec::beta_dist(1.4, 2.2), kernel_spec::matern(0.9, 1.4, 4)},
        {target_spec::uniform(), kernel_spec::matern(1.0, 1.0, 1)},
    };
    for (const auto& c : cases) {
        embedding_pair pair{c.t, c.k};
        const auto mm = moments(c.t);
        const double lo = c.t.bounded_support() ? -1.0 : mm.mean - 5.0 * std::sqrt(mm.variance);
        const double hi = c.t.bounded_support() ? 2.0 : mm.mean + 5.0 * std::sqrt(mm.variance);
        for (int i = 0; i <= 24; ++i) {
            const double x = lo + (hi - lo) * i / 24.0;
            CHECK(mean_embedding(pair, x) ==
                  doctest::Approx(embedding_oracle(c.t, c.k, x)).epsilon(2e-8));
        }
    }
}

TEST_CASE("embedding reduction relations") {
    const double c = 0.75;
    embedding_pair via_ge{target_spec::gaussian(0.2, 1.3),
                          kernel_spec::gaussian_exponentiated(1.0 / (2.0 * c * c), 0.0)};
    embedding_pair direct{target_spec::gaussian(0.2, 1.3), kernel_spec::gaussian(c)};
    const double lambda = 1.8;
    embedding_pair via_matern{target_spec::beta_dist(2.0, 3.0),
                              kernel_spec::matern(1.0, 1.0 / lambda, 0)};
    embedding_pair via_lap{target_spec::beta_dist(2.0, 3.0), kernel_spec::laplacian(lambda)};
    for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + 3.0 * i / 40.0;
        CHECK(std::fabs(mean_embedding(via_ge, x) - mean_embedding(direct, x)) <= 1e-12);
        CHECK(std::fabs(mean_embedding(via_matern, x) - mean_embedding(via_lap, x)) <= 1e-10);
    }
}

TEST_CASE("double expectation closed forms and quadrature fallback") {
    // independent of the target mean
    for (double m : {-3.0, 0.0, 1.7}) {
        embedding_pair gg{target_spec::gaussian(m, 1.0), kernel_spec::gaussian(1.0)};
        CHECK(double_expectation(gg) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
    embedding_pair ge{target_spec::gaussian(0, 1), kernel_spec::exponential(0.3)};
    CHECK(double_expectation(ge) == doctest::Approx(1.0 / std::sqrt(0.91)).epsilon(1e-12));

    // nested-series path cross-checked against two nested quadratures
    embedding_pair bl{target_spec::beta_dist(2.0, 3.0), kernel_spec::laplacian(1.0)};
    const auto t = bl.target;
    const double ref = oracle::integrate_beta_weighted(
        t.alpha - 1.0, t.beta - 1.0,
        [&](double y) {
            return embedding_oracle(t, bl.kernel, y) /
                   (std::pow(y, t.alpha - 1.0) * std::pow(1.0 - y, t.beta - 1.0));
        },
        0.0, 1.0);
    const double norm = oracle::integrate_beta_weighted(
        t.alpha - 1.0, t.beta - 1.0, [](double) { return 1.0; }, 0.0, 1.0);
    CHECK(double_expectation(bl, 1e-10) == doctest::Approx(ref / norm).epsilon(1e-8));
}

TEST_CASE("unsupported pairs and divergent parameters are rejected") {
    embedding_pair bad{target_spec::generalized_normal(0, 1, 4), kernel_spec::gaussian(1.0)};
    CHECK_THROWS_AS(mean_embedding(bad, 0.0), error);
    try {
        mean_embedding(bad, 0.0);
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_pair);
    }
    embedding_pair diver{target_spec::gaussian(0, 2), kernel_spec::exponential(0.3)};
    CHECK_THROWS_AS(mean_embedding(diver, 0.0), error); // b sigma^2 = 1.2
    try {
        mean_embedding(diver, 0.0);
    } catch (const error& e) {
        CHECK(e.code() == errc::divergent_parameter);
    }
}
