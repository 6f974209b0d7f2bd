#include "embeddings.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace mindiv {

namespace {

struct kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Series for the integral of y^a (1-y)^b e^{lambda y} on [0, z] with
// lambda >= 0: sum_k lambda^k/k! * Binc(a+k+1, b+1, z). All terms are
// nonnegative. The incomplete beta values are generated by the downward
// recurrence Binc(p,q,z) = ((p+q) Binc(p+1,q,z) + z^p (1-z)^q) / p, which
// only adds positive quantities; one continued-fraction evaluation seeds
// the recurrence at the top index.
truncated_sum e1_nonneg(double lambda, double z, double a, double b, int terms) {
    truncated_sum out;
    if (z <= 0.0) return out;
    const double q = b + 1.0;
    const int kmax = terms + 1; // one extra index for the tail envelope
    std::vector<double> binc(static_cast<std::size_t>(kmax) + 1);
    binc[kmax] = special::ibeta(a + kmax + 1.0, q, z);
    const double log_z = std::log(z);
    const double log_tail = (z < 1.0) ? q * std::log1p(-z) : -std::numeric_limits<double>::infinity();
    for (int k = kmax - 1; k >= 0; --k) {
        const double p = a + k + 1.0;
        const double boundary = (z < 1.0) ? std::exp(p * log_z + log_tail) : 0.0;
        binc[k] = ((p + q) * binc[k + 1] + boundary) / p;
    }
    kahan acc;
    double term = 1.0; // lambda^k / k!
    for (int k = 0; k <= terms; ++k) {
        acc.add(term * binc[k]);
        term *= lambda / (k + 1.0);
    }
    out.value = acc.sum;
    // term now holds lambda^{terms+1} / (terms+1)!
    out.bound = term * std::exp(lambda * z) * binc[kmax];
    return out;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

} // namespace

truncated_sum e1(double lambda, double z, double a, double b, int terms) {
    require(z >= 0.0 && z <= 1.0, errc::domain_error, "e1 needs z in [0,1]");
    require(a > -1.0 && b > -1.0, errc::domain_error, "e1 needs a > -1 and b > -1");
    require(terms >= 0, errc::domain_error, "e1 needs a nonnegative truncation order");
    if (lambda >= 0.0) return e1_nonneg(lambda, z, a, b, terms);
    // exp(lambda y) decays here; integrate the reflected positive series.
    const double lam = -lambda;
    const truncated_sum full = e1_nonneg(lam, 1.0, b, a, terms);
    const truncated_sum part = e1_nonneg(lam, 1.0 - z, b, a, terms);
    const double damp = std::exp(-lam);
    return {damp * (full.value - part.value), damp * (full.bound + part.bound)};
}

truncated_sum e2(double lambda, double z, double a, double b, int terms) {
    require(z >= 0.0 && z <= 1.0, errc::domain_error, "e2 needs z in [0,1]");
    require(a > -1.0 && b > -1.0, errc::domain_error, "e2 needs a > -1 and b > -1");
    require(terms >= 0, errc::domain_error, "e2 needs a nonnegative truncation order");
    if (lambda >= 0.0) {
        // Substituting y -> 1-y maps the integral onto the e1 form and turns
        // the alternating series into one with nonnegative terms, so large
        // lambda values do not suffer cancellation.
        const truncated_sum flipped = e1_nonneg(lambda, 1.0 - z, b, a, terms);
        const double damp = std::exp(-lambda);
        return {damp * flipped.value, damp * flipped.bound};
    }
    const double lam = -lambda;
    const truncated_sum full = e1_nonneg(lam, 1.0, a, b, terms);
    const truncated_sum part = e1_nonneg(lam, z, a, b, terms);
    return {full.value - part.value, full.bound + part.bound};
}

int choose_truncation(double lambda, double a, double b, double z, double tol) {
    require(tol > 0.0, errc::domain_error, "choose_truncation needs tol > 0");
    require(z >= 0.0 && z <= 1.0, errc::domain_error, "choose_truncation needs z in [0,1]");
    constexpr int kMaxOrder = 500;
    auto envelope = [&](int k) {
        return std::max(e1(lambda, z, a, b, k).bound, e2(lambda, z, a, b, k).bound);
    };
    int k = static_cast<int>(std::ceil(std::fabs(lambda))) + 10;
    k = std::min(k, kMaxOrder);
    if (envelope(k) <= tol) {
        while (k > 0 && envelope(k - 1) <= tol) --k;
        return k;
    }
    while (k < kMaxOrder) {
        ++k;
        if (envelope(k) <= tol) return k;
    }
    fail(errc::truncation_failure, "series tail bound did not reach tolerance by order 500");
}

void embedding_pair::validate() const {
    target.validate();
    kernel.validate();
    const auto tf = target.family;
    const auto kf = kernel.family;
    const bool gaussian_target = tf == target_family::gaussian;
    const bool beta_like = tf == target_family::beta || tf == target_family::uniform;
    bool ok = false;
    if (gaussian_target &&
        (kf == kernel_family::gaussian_exponentiated || kf == kernel_family::gaussian ||
         kf == kernel_family::exponential)) {
        ok = true;
    } else if (tf == target_family::skew_gaussian &&
               (kf == kernel_family::gaussian ||
                (kf == kernel_family::gaussian_exponentiated && kernel.b == 0.0))) {
        ok = true;
    } else if (beta_like && (kf == kernel_family::matern || kf == kernel_family::laplacian)) {
        ok = true;
    }
    require(ok, errc::unsupported_pair,
            "no analytic mean embedding for " + target.describe() + " with " + kernel.describe());
    if (gaussian_target && kernel.unbounded()) {
        const double cbar = kernel.b * target.sigma * target.sigma;
        require(cbar < 1.0, errc::divergent_parameter,
                "exponential-kernel embedding needs b * sigma^2 < 1");
    }
}

namespace {

// Lemma-form embedding for a beta target under the half-integer matern
// kernel. The laplacian case is the p = 0, sigma0 = 1, sigma = 1/lambda
// specialization and shares this code path.
double beta_matern_embedding(const target_spec& target, const kernel_spec& kernel, double x,
                             int truncation) {
    double alpha = 1.0, beta = 1.0;
    if (target.family == target_family::beta) {
        alpha = target.alpha;
        beta = target.beta;
    }
    double sigma0 = 1.0, sigma = 1.0;
    int p = 0;
    if (kernel.family == kernel_family::matern) {
        sigma0 = kernel.sigma0;
        sigma = kernel.sigma;
        p = kernel.p;
    } else {
        sigma = 1.0 / kernel.lambda;
    }
    const double lam = std::sqrt(2.0 * p + 1.0) / sigma;
    const double z = clamp01(x);

    int terms = truncation;
    if (terms <= 0) terms = choose_truncation(lam, alpha - 1.0, beta - 1.0, 1.0, 1e-10);

    // One E1/E2 evaluation per power offset j = p - i - k.
    std::vector<double> e1v(static_cast<std::size_t>(p) + 1), e2v(static_cast<std::size_t>(p) + 1);
    for (int j = 0; j <= p; ++j) {
        e1v[j] = e1(lam, z, j + alpha - 1.0, beta - 1.0, terms).value;
        e2v[j] = e2(lam, z, j + alpha - 1.0, beta - 1.0, terms).value;
    }

    const double exp_neg = std::exp(-lam * x);
    const double exp_pos = std::exp(lam * x);
    const bool log_space = p >= 10;
    const double log_front = std::lgamma(p + 1.0) - std::lgamma(2.0 * p + 1.0);

    double total = 0.0;
    for (int i = 0; i <= p; ++i) {
        double outer; // (p+i)!/(i!(p-i)!) * (2 lam)^{p-i}, with p!/(2p)! folded in
        if (log_space) {
            outer = std::exp(log_front + std::lgamma(p + i + 1.0) - std::lgamma(i + 1.0) -
                             std::lgamma(p - i + 1.0) + (p - i) * std::log(2.0 * lam));
        } else {
            double fact_p = 1.0, fact_2p = 1.0;
            for (int j = 2; j <= p; ++j) fact_p *= j;
            fact_2p = fact_p;
            for (int j = p + 1; j <= 2 * p; ++j) fact_2p *= j;
            double coef = 1.0;
            for (int j = i + 1; j <= p + i; ++j) coef *= j;
            for (int j = 2; j <= p - i; ++j) coef /= j;
            outer = fact_p / fact_2p * coef * std::pow(2.0 * lam, p - i);
        }
        double inner = 0.0;
        double x_pow = 1.0;
        double binom = 1.0; // C(p-i, k)
        for (int k = 0; k <= p - i; ++k) {
            const int j = p - i - k;
            const double sign1 = (j % 2 == 0) ? 1.0 : -1.0;
            const double sign2 = (k % 2 == 0) ? 1.0 : -1.0;
            inner += binom * x_pow * (sign1 * exp_neg * e1v[j] + sign2 * exp_pos * e2v[j]);
            x_pow *= x;
            binom *= static_cast<double>(p - i - k) / (k + 1.0);
        }
        total += outer * inner;
    }
    return sigma0 * sigma0 / special::beta_fn(alpha, beta) * total;
}

double gaussian_gaussian_exp_embedding(double m, double sigma, double a, double b, double x) {
    const double s2 = sigma * sigma;
    const double denom = 1.0 + 2.0 * a * s2;
    const double d = x - m;
    const double expo = -a * d * d / denom + (2.0 * b * m * x + b * (b + 4.0 * a) * s2 * x * x) /
                                                 (2.0 * denom);
    return std::exp(expo) / std::sqrt(denom);
}

} // namespace

double mean_embedding(const embedding_pair& pair, double x) {
    pair.validate();
    const auto& t = pair.target;
    const auto& k = pair.kernel;
    switch (t.family) {
        case target_family::gaussian: {
            if (k.family == kernel_family::gaussian) {
                const double denom = t.sigma * t.sigma + k.c * k.c;
                const double d = x - t.m;
                return k.c / std::sqrt(denom) * std::exp(-d * d / (2.0 * denom));
            }
            const double a = (k.family == kernel_family::exponential) ? 0.0 : k.a;
            return gaussian_gaussian_exp_embedding(t.m, t.sigma, a, k.b, x);
        }
        case target_family::skew_gaussian: {
            const double a =
                (k.family == kernel_family::gaussian) ? 1.0 / (2.0 * k.c * k.c) : k.a;
            const double denom = 1.0 + 2.0 * a * t.v;
            const double d = x - t.m;
            const double arg = 2.0 * a * t.s * std::sqrt(t.v) * d /
                               (denom * std::sqrt(denom + t.s * t.s));
            return 2.0 / std::sqrt(denom) * special::norm_cdf(arg) *
                   std::exp(-a * d * d / denom);
        }
        case target_family::beta:
        case target_family::uniform:
            return beta_matern_embedding(t, k, x, pair.truncation_order);
        default: fail(errc::unsupported_pair, "no analytic mean embedding for this pair");
    }
}

double double_expectation(const embedding_pair& pair, double tol) {
    pair.validate();
    const auto& t = pair.target;
    const auto& k = pair.kernel;

    if (t.family == target_family::gaussian) {
        const double s2 = t.sigma * t.sigma;
        if (k.family == kernel_family::gaussian) {
            return k.c / std::sqrt(k.c * k.c + 2.0 * s2);
        }
        if (k.family == kernel_family::exponential ||
            (k.family == kernel_family::gaussian_exponentiated && k.a == 0.0 && k.b > 0.0)) {
            const double cbar = k.b * s2;
            require(cbar < 1.0, errc::divergent_parameter,
                    "exponential-kernel double expectation needs b * sigma^2 < 1");
            return std::exp(k.b * t.m * t.m / (1.0 - cbar)) / std::sqrt(1.0 - cbar * cbar);
        }
        if (k.family == kernel_family::gaussian_exponentiated && k.b == 0.0) {
            if (k.a == 0.0) return 1.0; // constant kernel
            const double c = 1.0 / std::sqrt(2.0 * k.a);
            return c / std::sqrt(c * c + 2.0 * s2);
        }
    }

    // No closed form: integrate the analytic embedding against the target.
    const moment_set mm = moments(t);
    double lo, hi;
    if (t.bounded_support()) {
        lo = 0.0;
        hi = 1.0;
    } else {
        const double spread = 12.0 * std::sqrt(mm.variance);
        lo = mm.mean - spread;
        hi = mm.mean + spread;
    }
    return integrate([&](double y) { return mean_embedding(pair, y) * pdf(t, y); }, lo, hi, tol);
}

} // namespace mindiv
