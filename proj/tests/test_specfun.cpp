#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pproc/specfun.hpp"

using namespace pproc;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
}

TEST_CASE("mittag-leffler reduces to exp at nu = beta = 1") {
    for (double z = -20.0; z <= 5.0; z += 0.5)
        CHECK(rel(mittag_leffler({1.0, 1.0, z}), std::exp(z)) < 1e-10);
}

TEST_CASE("mittag-leffler at nu = 1/2 matches scaled erfc") {
    // E_{1/2,1}(-x) = e^{x^2} erfc(x)
    for (double x : {0.25, 1.0, 3.0})
        CHECK(rel(mittag_leffler({0.5, 1.0, -x}),
                  std::exp(x * x) * std::erfc(x)) < 1e-9);
}

TEST_CASE("mittag-leffler high-precision reference values") {
    struct Ref { double nu, beta, z, value; };
    // frozen from an independent arbitrary-precision evaluation
    const Ref refs[] = {
        {0.5, 1.0, -1.0, 0.427583576155807},
        {0.5, 1.0, -9.0, 0.062307724037774684},
        {0.5, 1.0, -50.0, 0.011281536265323773},
        {0.5, 1.8, -9.0, 0.11368102166454074},
        {0.7, 0.7, -5.0, 0.012201124167156127},
        {0.7, 1.0, -3.5, 0.11599093758675773},
        {0.9, 1.0, -12.0, 0.010275288049933645},
        {0.3, 1.0, -2.5, 0.24498312379478694},
        {0.6, 0.6, -4.0, 0.018264707855107769},
        {0.8, 0.8, -20.0, 0.00049582520959208669},
    };
    for (const Ref& r : refs)
        CHECK(rel(mittag_leffler({r.nu, r.beta, r.z}), r.value) < 1e-9);
}

TEST_CASE("mittag-leffler rejects bad arguments") {
    CHECK_THROWS_AS(mittag_leffler({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mittag_leffler({-0.5, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("generalized mittag-leffler reductions") {
    // delta = 1 is the two-parameter function
    for (double z : {-3.0, -1.0, 0.5})
        CHECK(rel(generalized_ml(0.7, 1.0, 1.0, z),
                  mittag_leffler({0.7, 1.0, z})) < 1e-12);
    // xi = gamma = 1, delta = 2: sum (r+1) z^r / r! = (1+z) e^z
    for (double z : {-0.5, 0.3, 2.0})
        CHECK(rel(generalized_ml(1.0, 1.0, 2.0, z),
                  (1.0 + z) * std::exp(z)) < 1e-12);
}

TEST_CASE("bell polynomial matches the Poisson moment oracle") {
    // B_k(x) = E N^k for N ~ Poisson(x), brute-forced from the pmf
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        for (unsigned k = 0; k <= 10; ++k) {
            double oracle = 0.0;
            for (unsigned m = 0; m <= 400; ++m)
                oracle += std::pow((double)m, (double)k) *
                          std::exp(m * std::log(x) - x - std::lgamma(m + 1.0));
            CHECK(rel(bell_polynomial(k, x), oracle) < 1e-9);
        }
    }
    // Bell numbers at x = 1
    CHECK(rel(bell_polynomial(3, 1.0), 5.0) < 1e-12);
    CHECK(rel(bell_polynomial(5, 1.0), 52.0) < 1e-12);
    CHECK(rel(bell_polynomial(10, 1.0), 115975.0) < 1e-9);
}

TEST_CASE("signed binomial coefficients") {
    CHECK(signed_binomial(5.0, 2) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(signed_binomial(0.5, 2) == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(signed_binomial(3.0, 0) == doctest::Approx(1.0));
    CHECK(signed_binomial(3.0, 5) == doctest::Approx(0.0));
}

TEST_CASE("fibonacci numbers and ratios") {
    CHECK(fibonacci(1) == 1);
    CHECK(fibonacci(2) == 1);
    CHECK(fibonacci(10) == 55);
    CHECK(fibonacci(92) == 7540113804746346429ULL);
    CHECK_THROWS_AS(fibonacci(93), OverflowError);
    CHECK(fibonacci_ratio(3) == doctest::Approx(1.5).epsilon(1e-15));
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(rel(fibonacci_ratio(40), phi) < 1e-15);
    CHECK(fibonacci_ratio(200) == doctest::Approx(phi).epsilon(1e-15));
}
