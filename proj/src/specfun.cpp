#include "pproc/specfun.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "pproc/quadrature.hpp"

namespace pproc {

void MlArgs::validate() const {
    if (!(nu > 0.0 && nu <= 1.0))
        throw std::invalid_argument("MlArgs: nu must be in (0,1]");
    if (!(beta > 0.0))
        throw std::invalid_argument("MlArgs: beta must be positive");
    if (!std::isfinite(z))
        throw std::invalid_argument("MlArgs: z must be finite");
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Guarded power series for E_{nu,beta}(z). Returns nothing when the
// alternating sum cancels past `max_cancel` or a term overflows, so the
// caller can switch representation.
std::optional<double> ml_series(double nu, double beta, double z,
                                const SeriesAccuracy& acc, double max_cancel) {
    long double sum = 0.0L;
    long double comp = 0.0L; // Kahan compensation
    long double max_term = 0.0L;
    long double prev_mag = std::numeric_limits<long double>::max();
    int quiet = 0;
    double ln_az = (z == 0.0) ? 0.0 : std::log(std::fabs(z));
    for (std::size_t r = 0; r < acc.max_terms; ++r) {
        double ln_mag = static_cast<double>(r) * ln_az - std::lgamma(nu * r + beta);
        if (ln_mag > 700.0) return std::nullopt;
        long double term = std::exp(ln_mag);
        if (z < 0.0 && (r & 1u)) term = -term;
        long double mag = std::fabs(term);
        if (mag > max_term) max_term = mag;
        long double y = term - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        bool decreasing = mag <= prev_mag;
        if (mag < acc.rel_tol * std::fabs((double)sum) && decreasing) {
            if (++quiet >= 3) {
                if (sum != 0.0L && max_term / std::fabs(sum) > max_cancel)
                    return std::nullopt;
                return static_cast<double>(sum);
            }
        } else {
            quiet = 0;
        }
        prev_mag = mag;
        if (z == 0.0) return static_cast<double>(sum); // only r=0 contributes
    }
    throw NonConvergence("mittag_leffler: series did not converge");
}

// Branch-cut integral representation, valid for 0<nu<1, 0<beta<1+nu, z<0.
// With x=-z>0 and t=x^{1/nu}:
//   E_{nu,beta}(-x) = t^{1-beta} Int_0^inf e^{-v^{1/nu} t} g(v) dv,
//   g(v) = (1/(nu*pi)) v^{(1-beta)/nu}
//          (v sin(pi beta) + sin(pi(beta-nu))) / (v^2 + 2 v cos(pi nu) + 1).
double ml_integral(double nu, double beta, double z, const SeriesAccuracy& acc) {
    const double x = -z;
    const double t = std::pow(x, 1.0 / nu);
    const double sb = std::sin(kPi * beta);
    const double sbn = std::sin(kPi * (beta - nu));
    const double cn = std::cos(kPi * nu);
    const double p = (1.0 - beta) / nu;
    auto g = [&](double v) -> double {
        if (v <= 0.0) return 0.0;
        double num = v * sb + sbn;
        double den = (v + 2.0 * cn) * v + 1.0;
        double val = num / den / (nu * kPi);
        if (p != 0.0) val *= std::pow(v, p);
        return val * std::exp(-std::pow(v, 1.0 / nu) * t);
    };
    double v_max = std::pow(60.0 / t, nu);
    double rel = std::min(acc.rel_tol, 1e-11);
    double result = integrate(g, 0.0, v_max, rel, 0.0, 8000);
    if (beta != 1.0) result *= std::pow(t, 1.0 - beta);
    return result;
}

// Asymptotic expansion for z -> -inf: E_{nu,beta}(z) ~ -sum_m z^{-m}/Gamma(beta-m nu).
double ml_asymptotic(double nu, double beta, double z) {
    double sum = 0.0;
    double prev = std::numeric_limits<double>::max();
    double zm = 1.0;
    for (int m = 1; m <= 12; ++m) {
        zm /= z;
        double g = std::tgamma(beta - m * nu);
        if (!std::isfinite(g) || g == 0.0) continue; // pole of 1/Gamma: term vanishes
        double term = -zm / g;
        if (std::fabs(term) > prev) break; // past the optimal truncation
        sum += term;
        prev = std::fabs(term);
    }
    return sum;
}

} // namespace

double mittag_leffler(const MlArgs& args, const SeriesAccuracy& acc) {
    args.validate();
    acc.validate();
    const double nu = args.nu;
    double beta = args.beta;
    const double z = args.z;

    if (nu == 1.0 && beta == 1.0) return std::exp(z);

    // Reduce beta below 1+nu so the integral representation applies if needed:
    // E_{nu,beta}(z) = (E_{nu,beta-nu}(z) - 1/Gamma(beta-nu)) / z.
    if (z < -2.0 && nu < 1.0 && beta >= 1.0 + nu) {
        MlArgs inner{nu, beta - nu, z};
        return (mittag_leffler(inner, acc) - 1.0 / std::tgamma(beta - nu)) / z;
    }

    if (z >= 0.0 || z > -2.0) {
        auto s = ml_series(nu, beta, z, acc, 1e15);
        if (s) return *s;
        throw NonConvergence("mittag_leffler: series failed for small argument");
    }

    // Negative argument, |z| >= 2: try the series with a tight cancellation
    // guard, then fall back.
    auto s = ml_series(nu, beta, z, acc, 1e3);
    if (s) return *s;
    if (nu < 1.0) return ml_integral(nu, beta, z, acc);
    if (z < -30.0) return ml_asymptotic(nu, beta, z);
    // nu == 1, beta != 1, moderately negative z: accept the precision the
    // guarded series can deliver.
    s = ml_series(nu, beta, z, acc, 1e15);
    if (s) return *s;
    throw NonConvergence("mittag_leffler: no representation converged");
}

double generalized_ml(double xi, double gamma, double delta, double z,
                      const SeriesAccuracy& acc) {
    if (!(xi > 0.0 && gamma > 0.0 && delta > 0.0))
        throw std::invalid_argument("generalized_ml: parameters must be positive");
    acc.validate();
    long double sum = 0.0L;
    long double rising = 1.0L; // (delta)_r / r!
    long double prev_mag = std::numeric_limits<long double>::max();
    int quiet = 0;
    for (std::size_t r = 0; r < acc.max_terms; ++r) {
        long double term = rising * std::exp(-(long double)std::lgamma(xi * r + gamma));
        sum += term;
        long double mag = std::fabs(term);
        bool decreasing = mag <= prev_mag;
        if (mag < acc.rel_tol * std::fabs((double)sum) && decreasing) {
            if (++quiet >= 3) return static_cast<double>(sum);
        } else {
            quiet = 0;
        }
        prev_mag = mag;
        rising *= (delta + r) / (r + 1.0L) * z;
        if (z == 0.0) return static_cast<double>(sum);
    }
    throw NonConvergence("generalized_ml: series did not converge");
}

double bell_polynomial(unsigned k, double x, const SeriesAccuracy& acc) {
    if (!(x >= 0.0))
        throw std::invalid_argument("bell_polynomial: x must be nonnegative");
    acc.validate();
    if (x == 0.0) return k == 0 ? 1.0 : 0.0;
    long double sum = 0.0L;
    for (std::size_t r = 0; r < acc.max_terms; ++r) {
        double ln_w = static_cast<double>(r) * std::log(x) - x - std::lgamma(r + 1.0);
        long double term = std::exp(ln_w);
        if (k > 0) term *= std::pow((long double)r, (long double)k);
        sum += term;
        // positive terms: once past the mode, plain relative cutoff is safe
        if (r > static_cast<std::size_t>(x) + k && term < acc.rel_tol * sum)
            return static_cast<double>(sum);
    }
    throw NonConvergence("bell_polynomial: series did not converge");
}

double signed_binomial(double a, unsigned j) {
    double result = 1.0;
    for (unsigned i = 0; i < j; ++i)
        result *= (a - i) / (i + 1.0);
    return result;
}

std::uint64_t fibonacci(unsigned n) {
    if (n < 1) throw std::invalid_argument("fibonacci: n must be >= 1");
    if (n > 92) throw OverflowError("fibonacci: exact 64-bit range ends at n=92");
    std::uint64_t a = 1, b = 1; // F_1, F_2
    for (unsigned i = 2; i < n; ++i) {
        std::uint64_t c = a + b;
        a = b;
        b = c;
    }
    return n == 1 ? 1 : b;
}

double fibonacci_ratio(unsigned n) {
    if (n < 1) throw std::invalid_argument("fibonacci_ratio: n must be >= 1");
    if (n >= 92) return 0.5 * (1.0 + std::sqrt(5.0)); // converged to the golden ratio
    return static_cast<double>(fibonacci(n + 1)) / static_cast<double>(fibonacci(n));
}

} // namespace pproc
