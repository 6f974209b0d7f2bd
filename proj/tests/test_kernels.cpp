#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "errors.hpp"
#include "kernels.hpp"
#include "oracle.hpp"
#include "rng.hpp"

using namespace mindiv;

TEST_CASE("kernel evaluation matches hand values") {
    CHECK(kernel_eval(kernel_spec::gaussian(1.0), 0.0, 0.0) == doctest::Approx(1.0));
    // p = 0 matern is the laplacian with lambda = 1/sigma
    CHECK(kernel_eval(kernel_spec::matern(1.0, 2.0, 0), 0.0, 1.0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(kernel_eval(kernel_spec::gaussian_exponentiated(1.0, 1.0), 1.0, 2.0) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(kernel_eval(kernel_spec::exponential(0.5), 2.0, 3.0) ==
          doctest::Approx(std::exp(3.0)).epsilon(1e-14));
}

TEST_CASE("kernel derivatives match hand values") {
    CHECK(kernel_dx(kernel_spec::gaussian(1.0), 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(kernel_dxdy(kernel_spec::gaussian(1.0), 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(kernel_dxdy(kernel_spec::laplacian(2.0), 0.0, 1.0) ==
          doctest::Approx(-4.0 * std::exp(-2.0)).epsilon(1e-14));
    // symmetric subgradient at the kink
    CHECK(kernel_dx(kernel_spec::laplacian(2.0), 0.7, 0.7) == 0.0);
}

TEST_CASE("kernel symmetry is exact") {
    const kernel_spec specs[] = {
        kernel_spec::gaussian(0.7),        kernel_spec::laplacian(1.3),
        kernel_spec::exponential(0.4),     kernel_spec::gaussian_exponentiated(0.8, 0.2),
        kernel_spec::matern(1.1, 0.9, 3),
    };
    rng g(7);
    for (const auto& k : specs) {
        for (int i = 0; i < 50; ++i) {
            const double x = g.uniform(-2.0, 2.0);
            const double y = g.uniform(-2.0, 2.0);
            CHECK(kernel_eval(k, x, y) == kernel_eval(k, y, x));
        }
    }
}

TEST_CASE("bounded kernels have positive semidefinite gram matrices") {
    const kernel_spec specs[] = {
        kernel_spec::gaussian(0.5),
        kernel_spec::laplacian(2.0),
        kernel_spec::matern(1.0, 0.8, 2),
        kernel_spec::matern(1.3, 1.1, 5),
    };
    rng g(11);
    std::vector<double> pts(50);
    for (auto& p : pts) p = g.uniform(-3.0, 3.0);
    for (const auto& k : specs) {
        Eigen::MatrixXd gram(50, 50);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) gram(i, j) = kernel_eval(k, pts[i], pts[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        CHECK(lo >= -1e-8 * hi);
    }
}

TEST_CASE("family reduction relations hold on a grid") {
    const double c = 0.6, b = 0.7, lambda = 1.4;
    const auto gauss = kernel_spec::gaussian(c);
    const auto gauss_via_ge = kernel_spec::gaussian_exponentiated(1.0 / (2.0 * c * c), 0.0);
    const auto expo = kernel_spec::exponential(b);
    const auto expo_via_ge = kernel_spec::gaussian_exponentiated(0.0, b);
    const auto lap = kernel_spec::laplacian(lambda);
    const auto lap_via_matern = kernel_spec::matern(1.0, 1.0 / lambda, 0);
    for (int i = 0; i <= 100; ++i) {
        const double x = -2.0 + 4.0 * i / 100.0;
        const double y = 1.3 - 2.0 * i / 100.0;
        CHECK(std::fabs(kernel_eval(gauss, x, y) - kernel_eval(gauss_via_ge, x, y)) <= 1e-12);
        CHECK(std::fabs(kernel_eval(expo, x, y) - kernel_eval(expo_via_ge, x, y)) <= 1e-12);
        CHECK(std::fabs(kernel_eval(lap, x, y) - kernel_eval(lap_via_matern, x, y)) <= 1e-12);
    }
}

TEST_CASE("derivatives agree with central finite differences") {
    const kernel_spec specs[] = {kernel_spec::gaussian(0.8), kernel_spec::laplacian(1.7)};
    rng g(3);
    for (const auto& k : specs) {
        for (int rep = 0; rep < 40; ++rep) {
            const double x = g.uniform(-2.0, 2.0);
            double y = g.uniform(-2.0, 2.0);
            if (std::fabs(x - y) < 1e-2) y += 0.05; // keep clear of the laplacian kink
            const double fd_dx =
                oracle::fd_derivative([&](double t) { return kernel_eval(k, t, y); }, x);
            CHECK(kernel_dx(k, x, y) == doctest::Approx(fd_dx).epsilon(1e-5));
            const double fd_dxdy = oracle::fd_derivative(
                [&](double t2) {
                    return oracle::fd_derivative(
                        [&](double t1) { return kernel_eval(k, t1, t2); }, x);
                },
                y);
            CHECK(kernel_dxdy(k, x, y) == doctest::Approx(fd_dxdy).epsilon(1e-5));
        }
    }
}

TEST_CASE("matern log-space branch matches a high-precision reference") {
    const auto k = kernel_spec::matern(1.2, 0.9, 12);
    auto reference = [&](double dist) {
        const long double root = std::sqrt(2.0L * k.p + 1.0L);
        const long double r = root * dist / k.sigma;
        long double poly = 0.0L;
        for (int i = 0; i <= k.p; ++i) {
            const long double lc = std::lgammal(k.p + i + 1.0L) - std::lgammal(i + 1.0L) -
                                   std::lgammal(k.p - i + 1.0L);
            poly += std::expl(lc) * std::powl(2.0L * r, k.p - i);
        }
        const long double front =
            std::expl(std::lgammal(k.p + 1.0L) - std::lgammal(2.0L * k.p + 1.0L));
        return static_cast<double>(k.sigma0 * k.sigma0 * front * poly * std::expl(-r));
    };
    for (double d : {0.0, 0.05, 0.3, 1.0, 2.5}) {
        CHECK(kernel_eval(k, d, 0.0) == doctest::Approx(reference(d)).epsilon(1e-11));
    }
    CHECK(kernel_eval(k, 1.0, 1.0) == doctest::Approx(k.sigma0 * k.sigma0));
}

TEST_CASE("derivatives reject families without closed forms") {
    CHECK_THROWS_AS(kernel_dx(kernel_spec::matern(1.0, 1.0, 1), 0.0, 1.0), error);
    CHECK_THROWS_AS(kernel_dxdy(kernel_spec::exponential(0.5), 0.0, 1.0), error);
    try {
        kernel_dx(kernel_spec::exponential(0.5), 0.0, 1.0);
        CHECK(false);
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_kernel);
    }
}

TEST_CASE("kernel parameter validation") {
    CHECK_THROWS_AS(kernel_spec::gaussian(0.0), error);
    CHECK_THROWS_AS(kernel_spec::laplacian(-1.0), error);
    CHECK_THROWS_AS(kernel_spec::exponential(0.0), error);
    CHECK_THROWS_AS(kernel_spec::gaussian_exponentiated(-0.1, 0.0), error);
    CHECK_THROWS_AS(kernel_spec::matern(1.0, -1.0, 0), error);
    CHECK_THROWS_AS(kernel_spec::matern(1.0, 1.0, -1), error);
}
