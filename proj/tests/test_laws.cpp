#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pproc/laws.hpp"
#include "pproc/quadrature.hpp"
#include "pproc/specfun.hpp"

using namespace pproc;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double negbin(unsigned r, unsigned k, double la, double lb) {
    double lp = std::log(lb / (la + lb)), lq = std::log(la / (la + lb));
    return std::exp(std::lgamma((double)k + r) - std::lgamma((double)k) -
                    std::lgamma(r + 1.0) + k * lp + r * lq);
}
} // namespace

TEST_CASE("iterated poisson pmf and pgf") {
    CompositionParams p{1.0, 1.0, 1.0, 1.0};
    // P(0) = exp(lb t (e^{-la} - 1))
    CHECK(rel(iterated_poisson_pmf(0, p), std::exp(std::exp(-1.0) - 1.0)) < 1e-12);
    // P(1) = e^{-1} sum_m m e^{-m}/m! = e^{-2 + 1/e}
    CHECK(rel(iterated_poisson_pmf(1, p), std::exp(-2.0 + std::exp(-1.0))) < 1e-12);
    // pgf duality: sum u^k pmf = pgf
    for (double u : {0.0, 0.4, 0.9}) {
        double sum = 0.0, up = 1.0;
        for (unsigned k = 0; k < 80; ++k) {
            sum += up * iterated_poisson_pmf(k, p);
            up *= u;
        }
        CHECK(rel(sum, iterated_poisson_pgf(u, p)) < 1e-10);
    }
    auto [mean, var] = iterated_poisson_moments(p);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(var == doctest::Approx(2.0).epsilon(1e-12)); // la (1 + la) lb t
}

TEST_CASE("iterated pmf satisfies its difference-differential system") {
    CompositionParams p{0.5, 2.0, 1.0, 1.3};
    for (unsigned k = 0; k <= 5; ++k)
        CHECK(std::fabs(iterated_pmf_dde_residual(k, p, 1e-4)) < 1e-6);
}

TEST_CASE("hitting time density and defective mass") {
    const double la = 1.0;
    double m1 = hitting_time_total_mass(1, la);
    CHECK(rel(m1, la * std::exp(-la) / (-std::expm1(-la))) < 1e-10);
    double m2 = hitting_time_total_mass(2, la);
    CHECK(rel(m2, m1 * m1 + 0.5 * la * m1) < 1e-10);
    for (unsigned k : {1u, 2u}) {
        CompositionParams p{la, 1.0, 1.0, 1.0};
        double integral = integrate(
            [&](double s) { return hitting_time_density(k, s, p); }, 1e-12, 60.0);
        CHECK(rel(integral, hitting_time_total_mass(k, la)) < 1e-8);
    }
    for (double lam : {0.5, 1.0, 2.0})
        for (unsigned k = 1; k <= 5; ++k) {
            double m = hitting_time_total_mass(k, lam);
            CHECK(m > 0.0);
            CHECK(m < 1.0);
        }
}

TEST_CASE("fractional poisson reduces to poisson at nu = 1") {
    const double lb = 1.4, t = 0.8;
    for (unsigned m = 0; m <= 30; ++m) {
        double mu = lb * t;
        double exact = std::exp(m * std::log(mu) - mu - std::lgamma(m + 1.0));
        CHECK(rel(frac_poisson_pmf(m, t, 1.0, lb), exact) < 1e-8);
    }
    // normalization at nu = 0.6 over the bulk
    double mass = 0.0;
    for (unsigned m = 0; m <= 120; ++m) mass += frac_poisson_pmf(m, 1.0, 0.6, 1.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tau density: Erlang reduction and Laplace transform") {
    const double lb = 2.0;
    for (unsigned k : {1u, 3u})
        for (double s : {0.3, 1.0, 2.5}) {
            double erlang = std::exp(k * std::log(lb) + (k - 1.0) * std::log(s) -
                                     lb * s - std::lgamma((double)k));
            CHECK(rel(tau_density(k, s, 1.0, lb), erlang) < 1e-10);
        }
    // numerical Laplace transform vs closed form, fractional case
    const double nu = 0.5, mu = 1.0;
    for (unsigned k : {1u, 2u}) {
        // substitution s = w^2 removes the s^{nu-1} endpoint singularity
        double numeric = integrate(
            [&](double w) {
                return 2.0 * w * std::exp(-mu * w * w) *
                       tau_density(k, w * w, nu, lb);
            },
            1e-30, std::sqrt(80.0));
        CHECK(rel(numeric, tau_laplace(k, mu, nu, lb)) < 1e-8);
        CHECK(rel(tau_laplace(k, mu, nu, lb),
                  std::pow(lb / (lb + std::pow(mu, nu)), (double)k)) < 1e-12);
    }
}

TEST_CASE("tau density heavy tail at nu < 1") {
    // f(s) ~ k nu s^{-nu-1} / (lb Gamma(1-nu)) for large s
    const double nu = 0.5, lb = 1.0;
    const unsigned k = 2;
    double s = 5e4;
    double tail = k * nu * std::pow(s, -nu - 1.0) /
                  (lb * std::tgamma(1.0 - nu));
    CHECK(rel(tau_density(k, s, nu, lb), tail) < 1e-2);
}

TEST_CASE("composed tau law: negative binomial at nu = 1") {
    const double la = 1.0, lb = 2.0;
    CompositionParams p{la, lb, 1.0, 1.0};
    for (unsigned k : {1u, 2u, 5u})
        for (unsigned r = 0; r <= 30; ++r)
            CHECK(rel(composed_tau_pmf(r, k, p), negbin(r, k, la, lb)) < 1e-8);
    // dml with c = lb/la^nu is the k = 1 case, geometric here
    for (unsigned r = 0; r <= 30; ++r)
        CHECK(rel(dml_pmf(r, 1.0, lb / la), negbin(r, 1, la, lb)) < 1e-8);
}

TEST_CASE("composed tau pgf duality and closed form") {
    CompositionParams p{1.5, 1.0, 0.6, 1.0};
    const unsigned k = 2;
    PmfTable table = composed_tau_table(k, p, 1e-10, 4000);
    for (double u : {0.0, 0.3, 0.7}) {
        double sum = 0.0, up = 1.0;
        for (double q : table.probs) {
            sum += up * q;
            up *= u;
            if (up == 0.0) break;
        }
        CHECK(std::fabs(sum - composed_tau_pgf(u, k, p)) < 1e-6);
        double closed = std::pow(
            p.lambda_beta /
                (p.lambda_beta + std::pow(p.lambda_alpha * (1.0 - u), p.nu)),
            (double)k);
        CHECK(rel(composed_tau_pgf(u, k, p), closed) < 1e-12);
    }
}

TEST_CASE("composed tau table agrees with direct evaluation") {
    for (CompositionParams p : {CompositionParams{1.0, 2.0, 1.0, 1.0},
                                CompositionParams{4.0, 1.0, 0.7, 1.0},
                                CompositionParams{1.0, 1.0, 0.5, 1.0}}) {
        PmfTable table = composed_tau_table(2, p, 1e-6, 3000);
        CHECK(table.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
        for (unsigned r : {0u, 1u, 5u, 20u, 100u}) {
            if (r >= table.probs.size()) continue;
            CHECK(rel(table.probs[r], composed_tau_pmf(r, 2, p)) < 1e-8);
        }
    }
}

TEST_CASE("yule process at the passage time") {
    CompositionParams eq{1.0, 1.0, 1.0, 1.0};
    for (unsigned r = 1; r <= 60; ++r)
        CHECK(rel(yule_tau_pmf(r, 1, eq), 1.0 / ((double)r * (r + 1.0))) < 1e-8);
    CompositionParams gen{1.0, 2.0, 1.0, 1.0};
    for (unsigned r = 1; r <= 30; ++r) {
        double beta = 2.0 * std::exp(std::lgamma((double)r) + std::lgamma(3.0) -
                                     std::lgamma(r + 3.0));
        CHECK(rel(yule_tau_pmf(r, 1, gen), beta) < 1e-8);
    }
    // pgf duality, including the Euler-transformed branch at u close to 1
    CompositionParams p{1.0, 2.0, 0.8, 1.0};
    for (double u : {0.4, 0.7}) {
        double sum = 0.0;
        for (unsigned r = 1; r <= 160; ++r)
            sum += std::pow(u, (double)r) * yule_tau_pmf(r, 2, p);
        CHECK(std::fabs(sum - yule_tau_pgf(u, 2, p)) < 1e-6);
    }
}

TEST_CASE("poisson-logarithmic decomposition of the negative binomial") {
    const unsigned k = 3;
    const double la = 1.0, lb = 2.0;
    auto [mu, q] = negbin_decomposition_params(k, la, lb);
    for (double u : {0.3, 0.6}) {
        double log_pgf = std::log1p(-q * u) / std::log1p(-q);
        double lhs = std::exp(mu * (log_pgf - 1.0));
        double rhs = std::pow(lb / (lb + la * (1.0 - u)), (double)k);
        CHECK(rel(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("fractional birth process with distinct rates") {
    BirthRates rates{{1.0, 2.0, 3.0, 4.0}};
    // nu = 1, linear rates j*lb give the geometric Yule law
    BirthRates linear{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}};
    const double t = 0.7;
    for (unsigned k = 1; k <= 8; ++k) {
        double geo = std::exp(-t) * std::pow(-std::expm1(-t), k - 1.0);
        CHECK(rel(frac_birth_pmf(k, t, 1.0, linear), geo) < 1e-8);
    }
    // mixed pgf identity against the composed pgf
    const double la = 1.0;
    for (double nu : {0.6, 1.0})
        for (double u : {0.0, 0.3, 0.7}) {
            double v = std::exp(la * (u - 1.0));
            double mixed = 0.0;
            for (unsigned r = 1; r <= 4; ++r)
                mixed += std::pow(v, (double)r) * frac_birth_pmf(r, 1.0, nu, rates);
            CHECK(std::fabs(mixed - composed_birth_pgf(u, 1.0, nu, rates, la)) < 1e-8);
        }
    CHECK_THROWS_AS(BirthRates({{1.0, 1.0 + 1e-14, 2.0}}).validate(),
                    DegenerateRates);
}

TEST_CASE("phi law: density, cdf and pgf forms") {
    const unsigned k = 3;
    const double nu = 0.7, lb = 1.0;
    // density is the derivative of the cdf
    for (double t : {0.3, 1.0, 3.0}) {
        const double h = 1e-5;
        double num = (phi_cdf(k, t + h, nu, lb) - phi_cdf(k, t - h, nu, lb)) /
                     (2.0 * h);
        CHECK(rel(phi_density(k, t, nu, lb), num) < 1e-6);
    }
    CHECK(phi_cdf(k, 1e-9, nu, lb) < 1e-6);
    CHECK(phi_cdf(k, 1e4, nu, lb) == doctest::Approx(1.0).epsilon(1e-3));
    // k = 1 composition coincides with the tau composition
    CompositionParams p{1.0, lb, nu, 1.0};
    for (double u : {0.2, 0.6})
        CHECK(rel(composed_phi_pgf(u, 1, p), composed_tau_pgf(u, 1, p)) < 1e-12);
}

TEST_CASE("multiplicative compound poisson transforms") {
    const double t = 0.5, lambda = 2.0;
    // E X^{eta-1} = p for 0/1 jumps
    CHECK(rel(product_mellin(3.0, t, lambda, [](double) { return 0.25; }),
              std::exp(-lambda * t * 0.75)) < 1e-12);
    // standard normal jumps: cov(Z_s, Z_t) at s=0.5, t=1, lambda=1
    double cov = product_covariance(0.5, 1.0, 1.0, 0.0, 1.0);
    CHECK(rel(cov, std::exp(-0.5) - std::exp(-1.5)) < 1e-12);
}

TEST_CASE("cauchy continued fraction scales") {
    CHECK(rel(cfrac_scale(1), 1.0) < 1e-15);
    CHECK(rel(cfrac_scale(3), 1.5) < 1e-15);
    CHECK(rel(cfrac_scale(8), 34.0 / 21.0) < 1e-15);
    for (unsigned n = 1; n <= 30; ++n)
        CHECK(rel(cfrac_scale_expansion(n), cfrac_scale(n)) < 1e-12);
    // mixture characteristic function: value 1 at beta = 0, golden-ratio
    // scale in the large-t limit
    CHECK(cfrac_charfn(0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(rel(cfrac_charfn(1.0, 400.0, 1.0), std::exp(-phi)) < 1e-6);
    // density at 0 equals the mixture of Cauchy peaks
    double f0 = cfrac_mixture_density(0.0, 1.0, 1.0);
    CHECK(f0 > 0.0);
    double sym = cfrac_mixture_density(0.7, 1.0, 1.0) -
                 cfrac_mixture_density(-0.7, 1.0, 1.0);
    CHECK(std::fabs(sym) < 1e-14);
}

TEST_CASE("rescaled tau laplace approaches the stable transform") {
    for (double mu : {0.5, 1.0, 2.0})
        CHECK(std::fabs(rescaled_tau_laplace(1e6, 1.0, mu, 0.5, 1.0) -
                        std::exp(-std::pow(mu, 0.5))) < 1e-5);
}

TEST_CASE("tabulation certifies its tail") {
    PmfTable t = tabulate_pmf(
        [](std::int64_t k) {
            return std::exp(k * std::log(2.0) - 2.0 - std::lgamma(k + 1.0));
        },
        0, 1e-9, 200);
    CHECK(t.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.tail_bound < 1e-9);
    CHECK(t.prob_at(-1) == 0.0);
    CHECK(t.prob_at(2) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(CompositionParams({-1.0, 1.0, 1.0, 1.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(CompositionParams({1.0, 1.0, 1.5, 1.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(iterated_poisson_pgf(1.5, {1.0, 1.0, 1.0, 1.0}),
                    std::invalid_argument);
}
