#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pproc/samplers.hpp"
#include "pproc/specfun.hpp"
#include "pproc/verify.hpp"

using namespace pproc;

namespace {
constexpr std::uint64_t kN = 200000;
constexpr std::uint64_t kSeed = 20240817;

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / (double)xs.size();
}
} // namespace

TEST_CASE("poisson generator across both regimes") {
    for (double mu : {0.7, 12.0, 30.0, 80.0, 500.0}) {
        RngStream rng(kSeed, 1);
        double sum = 0.0, sq = 0.0;
        for (std::uint64_t i = 0; i < kN; ++i) {
            double x = (double)rng.poisson(mu);
            sum += x;
            sq += x * x;
        }
        double m = sum / kN, v = sq / kN - m * m;
        // mean and variance both equal mu; 5 sigma bands
        CHECK(std::fabs(m - mu) < 5.0 * std::sqrt(mu / kN));
        CHECK(std::fabs(v - mu) < 5.0 * mu * std::sqrt(3.0 / kN));
    }
}

TEST_CASE("distinct streams are independent") {
    RngStream a(kSeed, 3), b(kSeed, 4);
    double corr = 0.0;
    for (int i = 0; i < 20000; ++i)
        corr += (a.uniform01() - 0.5) * (b.uniform01() - 0.5);
    corr /= 20000.0 / 12.0; // normalized by the uniform variance
    CHECK(std::fabs(corr) < 0.05);
}

TEST_CASE("positive stable variates match the stable transform") {
    const double nu = 0.6;
    RngStream rng(kSeed, 5);
    std::vector<double> xs(kN);
    for (auto& x : xs) x = sample_stable_positive(nu, rng);
    for (double mu : {1.0, 2.0}) {
        double lt = empirical_transform(xs, TransformKind::Laplace, mu);
        CHECK(std::fabs(lt - std::exp(-std::pow(mu, nu))) < 5.0 / std::sqrt((double)kN));
    }
}

TEST_CASE("mittag-leffler waiting times have the right survival") {
    const double nu = 0.8, lb = 1.0;
    RngStream rng(kSeed, 6);
    for (double t : {0.5, 1.5}) {
        std::uint64_t alive = 0;
        for (std::uint64_t i = 0; i < kN; ++i)
            if (sample_ml_waiting_time(nu, lb, rng) > t) ++alive;
        double surv = mittag_leffler({nu, 1.0, -lb * std::pow(t, nu)});
        CHECK(std::fabs((double)alive / kN - surv) < 5.0 / std::sqrt((double)kN));
    }
}

TEST_CASE("tau sampler matches the closed Laplace transform") {
    const unsigned k = 2;
    const double nu = 0.7, lb = 1.5;
    RngStream rng(kSeed, 7);
    std::vector<double> xs(kN);
    for (auto& x : xs) x = sample_tau(k, nu, lb, rng);
    for (double mu : {0.5, 1.0}) {
        double lt = empirical_transform(xs, TransformKind::Laplace, mu);
        double exact = tau_laplace(k, mu, nu, lb);
        CHECK(std::fabs(lt - exact) < 5.0 / std::sqrt((double)kN));
    }
}

TEST_CASE("fractional poisson counts match the exact pmf") {
    const double nu = 0.7, lb = 1.0, t = 1.0;
    PmfTable exact = tabulate_pmf(
        [&](std::int64_t m) { return frac_poisson_pmf((unsigned)m, t, nu, lb); },
        0, 1e-6, 200);
    RngStream rng(kSeed, 8);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < kN; ++i)
        h.add((std::int64_t)sample_frac_poisson_count(t, nu, lb, rng));
    CHECK(tv_distance(h, exact) < 0.012);
}

TEST_CASE("dml sampler matches the exact law") {
    const double nu = 0.7, la = 2.0, lb = 1.0;
    PmfTable exact = composed_tau_table(1, {la, lb, nu, 1.0}, 1e-4, 5000);
    RngStream rng(kSeed, 9);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < kN; ++i)
        h.add((std::int64_t)sample_dml(nu, la, lb, rng));
    CHECK(tv_distance(h, exact) < 0.02);
}

TEST_CASE("yule counts grow at the exponential rate") {
    const double la = 0.5, t = 1.0;
    RngStream rng(kSeed, 10);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < kN; ++i)
        sum += (double)sample_yule_count(la, t, rng);
    CHECK(std::fabs(sum / kN - std::exp(la * t)) < 0.02);
}

TEST_CASE("logarithmic sampler hits the first mass") {
    const double q = 0.6;
    RngStream rng(kSeed, 11);
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < kN; ++i)
        if (sample_logarithmic(q, rng) == 1) ++ones;
    double p1 = -q / std::log1p(-q);
    CHECK(std::fabs((double)ones / kN - p1) < 5.0 / std::sqrt((double)kN));
}

TEST_CASE("phi sampler mean at nu = 1 is the harmonic number") {
    const unsigned k = 3;
    const double lb = 2.0;
    PhiSampler phi(k, 1.0, lb, 1 << 13);
    RngStream rng(kSeed, 12);
    std::vector<double> xs(kN);
    for (auto& x : xs) x = phi(rng);
    double expect = (1.0 + 0.5 + 1.0 / 3.0) / lb;
    CHECK(std::fabs(mean_of(xs) - expect) < 0.01);
}

TEST_CASE("continued fraction sampler has the fibonacci scale") {
    RngStream rng(kSeed, 13);
    std::vector<double> xs(kN);
    for (auto& x : xs) x = sample_cfrac(3, rng);
    double mle = cauchy_scale_mle(xs);
    // asymptotic sd of the scale MLE is b sqrt(2/n)
    CHECK(std::fabs(mle / 1.5 - 1.0) < 5.0 * std::sqrt(2.0 / (double)kN));
}

TEST_CASE("product sampler mean for bernoulli jumps") {
    const double t = 0.5, lambda = 2.0, p = 0.25;
    RngStream rng(kSeed, 14);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < kN; ++i)
        sum += sample_product(
            t, lambda, [&](RngStream& g) { return g.uniform01() < p ? 1.0 : 0.0; },
            rng);
    double expect = std::exp(-lambda * t * (1.0 - p));
    CHECK(std::fabs(sum / kN - expect) < 5.0 / std::sqrt((double)kN));
}

TEST_CASE("thinning sampler for a non-homogeneous rate") {
    RateFunction rf{[](double w) { return 2.0 * w; },
                    [](double w) { return w * w; }, 2.0};
    RngStream rng(kSeed, 15);
    double sum = 0.0;
    std::uint64_t n = 100000;
    for (std::uint64_t i = 0; i < n; ++i) {
        JumpPath path = sample_nonhom_poisson(rf, 1.0, rng);
        sum += path.levels.empty() ? 0.0 : (double)path.levels.back();
    }
    CHECK(std::fabs(sum / n - 1.0) < 0.02); // Lambda(1) = 1
    RateFunction bad{[](double) { return 3.0; }, [](double w) { return 3.0 * w; },
                     2.0};
    CHECK_THROWS_AS(sample_nonhom_poisson(bad, 1.0, rng), InvalidBound);
}

TEST_CASE("composition path equals the random sum in law") {
    const double la = 1.0, lb = 1.0, t = 1.0;
    PmfTable exact = tabulate_pmf(
        [&](std::int64_t k) {
            return iterated_poisson_pmf((unsigned)k, {la, lb, 1.0, t});
        },
        0, 1e-9, 128);
    RngStream rng(kSeed, 16);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < kN; ++i) {
        JumpPath inner;
        double s = 0.0;
        std::int64_t level = 0;
        for (;;) {
            s += rng.exponential(lb);
            if (s > t) break;
            inner.times.push_back(s);
            inner.levels.push_back(++level);
        }
        JumpPath out = sample_composition_path(la, inner, rng);
        h.add(out.levels.empty() ? 0 : out.levels.back());
    }
    CHECK(tv_distance(h, exact) < 0.012);
}

TEST_CASE("jump path evaluation is right-continuous") {
    JumpPath path;
    path.times = {0.5, 1.5};
    path.levels = {2, 5};
    CHECK(path.level_at(0.0) == 0);
    CHECK(path.level_at(0.5) == 2);
    CHECK(path.level_at(1.0) == 2);
    CHECK(path.level_at(2.0) == 5);
}
