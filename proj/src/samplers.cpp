#include "pproc/samplers.hpp"

#include <algorithm>
#include <cmath>

namespace pproc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::int64_t JumpPath::level_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return origin_level;
    return levels[static_cast<std::size_t>(it - times.begin()) - 1];
}

std::uint64_t sample_poisson_count(double lambda, double t, RngStream& rng) {
    if (!(lambda > 0.0) || !(t >= 0.0))
        throw std::invalid_argument("sample_poisson_count: bad parameters");
    return rng.poisson(lambda * t);
}

JumpPath sample_nonhom_poisson(const RateFunction& rf, double t, RngStream& rng) {
    if (!(t >= 0.0))
        throw std::invalid_argument("sample_nonhom_poisson: t must be >= 0");
    JumpPath path;
    if (t == 0.0 || rf.sup_bound == 0.0) return path;
    if (!(rf.sup_bound > 0.0))
        throw InvalidBound("sample_nonhom_poisson: sup_bound must be positive");
    double s = 0.0;
    std::int64_t level = 0;
    for (;;) {
        s += rng.exponential(rf.sup_bound);
        if (s > t) break;
        double rate = rf.evaluator(s);
        if (rate > rf.sup_bound)
            throw InvalidBound("sample_nonhom_poisson: rate exceeds sup_bound");
        if (rng.uniform01() * rf.sup_bound <= rate) {
            path.times.push_back(s);
            path.levels.push_back(++level);
        }
    }
    return path;
}

double sample_ml_waiting_time(double nu, double lambda, RngStream& rng) {
    if (!(nu > 0.0 && nu <= 1.0) || !(lambda > 0.0))
        throw std::invalid_argument("sample_ml_waiting_time: bad parameters");
    double e = rng.exponential();
    if (nu == 1.0) return e / lambda;
    double s = sample_stable_positive(nu, rng);
    return std::pow(e / lambda, 1.0 / nu) * s;
}

double sample_tau(unsigned k, double nu, double lambda_beta, RngStream& rng) {
    if (k < 1) throw std::invalid_argument("sample_tau: k must be >= 1");
    double sum = 0.0;
    for (unsigned j = 0; j < k; ++j)
        sum += sample_ml_waiting_time(nu, lambda_beta, rng);
    return sum;
}

std::uint64_t sample_frac_poisson_count(double t, double nu, double lambda_beta,
                                        RngStream& rng) {
    if (!(t >= 0.0))
        throw std::invalid_argument("sample_frac_poisson_count: t must be >= 0");
    std::uint64_t n = 0;
    double s = 0.0;
    for (;;) {
        s += sample_ml_waiting_time(nu, lambda_beta, rng);
        if (s > t) return n;
        ++n;
    }
}

std::int64_t sample_random_sum(const CountSampler& count, const IntSampler& jump,
                               RngStream& rng) {
    std::uint64_t n = count(rng);
    std::int64_t sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) sum += jump(rng);
    return sum;
}

JumpPath sample_composition_path(double outer_rate, const JumpPath& inner,
                                 RngStream& rng) {
    if (!(outer_rate > 0.0))
        throw std::invalid_argument("sample_composition_path: rate must be positive");
    JumpPath out;
    std::int64_t prev_inner = inner.origin_level;
    std::int64_t level = 0;
    for (std::size_t i = 0; i < inner.times.size(); ++i) {
        std::int64_t delta = inner.levels[i] - prev_inner;
        prev_inner = inner.levels[i];
        if (delta <= 0) continue;
        std::uint64_t inc = rng.poisson(outer_rate * static_cast<double>(delta));
        if (inc > 0) {
            level += static_cast<std::int64_t>(inc);
            out.times.push_back(inner.times[i]);
            out.levels.push_back(level);
        }
    }
    return out;
}

std::uint64_t sample_dml(double nu, double lambda_alpha, double lambda_beta,
                         RngStream& rng) {
    if (!(lambda_alpha > 0.0))
        throw std::invalid_argument("sample_dml: rate must be positive");
    double s = sample_tau(1, nu, lambda_beta, rng);
    return rng.poisson(lambda_alpha * s);
}

std::uint64_t sample_yule_count(double lambda, double t, RngStream& rng) {
    if (!(lambda > 0.0) || !(t >= 0.0))
        throw std::invalid_argument("sample_yule_count: bad parameters");
    if (t == 0.0) return 1;
    // geometric on {1,2,...} with success probability e^{-lambda t}
    double p = std::exp(-lambda * t);
    if (p >= 1.0) return 1;
    double u = rng.uniform01();
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

PhiSampler::PhiSampler(unsigned k, double nu, double lambda_beta,
                       std::size_t grid) {
    if (grid < (1u << 10))
        throw std::invalid_argument("PhiSampler: grid must be >= 1024");
    // bracket the quantile range, then tabulate the CDF on log-spaced points
    double lo = 1.0 / lambda_beta, hi = 1.0 / lambda_beta;
    while (phi_cdf(k, lo, nu, lambda_beta) > 1e-7 && lo > 1e-150) lo *= 0.25;
    while (phi_cdf(k, hi, nu, lambda_beta) < 1.0 - 1e-7 && hi < 1e150) hi *= 4.0;
    ts_.resize(grid);
    cdf_.resize(grid);
    double lr = std::log(lo), step = (std::log(hi) - lr) / (double)(grid - 1);
    for (std::size_t i = 0; i < grid; ++i) {
        ts_[i] = std::exp(lr + step * static_cast<double>(i));
        cdf_[i] = phi_cdf(k, ts_[i], nu, lambda_beta);
        if (i > 0 && cdf_[i] < cdf_[i - 1] - 1e-12)
            throw TabulationFailure("PhiSampler: CDF table not monotone");
        if (i > 0 && cdf_[i] < cdf_[i - 1]) cdf_[i] = cdf_[i - 1];
    }
}

double PhiSampler::operator()(RngStream& rng) const {
    double u = rng.uniform01();
    if (u <= cdf_.front()) return ts_.front();
    if (u >= cdf_.back()) return ts_.back();
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    double c0 = cdf_[j - 1], c1 = cdf_[j];
    double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return ts_[j - 1] + w * (ts_[j] - ts_[j - 1]);
}

double sample_phi(unsigned k, double nu, double lambda_beta, RngStream& rng,
                  std::size_t grid) {
    PhiSampler sampler(k, nu, lambda_beta, grid);
    return sampler(rng);
}

double sample_product(double t, double lambda, const RealSampler& jump,
                      RngStream& rng) {
    if (!(lambda > 0.0) || !(t >= 0.0))
        throw std::invalid_argument("sample_product: bad parameters");
    std::uint64_t n = rng.poisson(lambda * t);
    double prod = 1.0;
    for (std::uint64_t i = 0; i < n; ++i) prod *= jump(rng);
    return prod;
}

double sample_stable_positive(double nu, RngStream& rng) {
    if (!(nu > 0.0 && nu < 1.0))
        throw std::invalid_argument("sample_stable_positive: nu must be in (0,1)");
    // Kanter's representation of the stable law with Laplace transform
    // exp(-mu^nu)
    double u = rng.uniform01();
    double w = rng.exponential();
    double pu = kPi * u;
    double a = std::sin(nu * pu) *
               std::pow(std::sin((1.0 - nu) * pu), (1.0 - nu) / nu) /
               std::pow(std::sin(pu), 1.0 / nu);
    return a * std::pow(w, -(1.0 - nu) / nu);
}

double sample_cfrac(unsigned n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_cfrac: n must be >= 1");
    double x = rng.cauchy();
    for (unsigned i = 1; i < n; ++i) {
        while (x == 0.0) x = rng.cauchy(); // probability-zero denominator
        x = rng.cauchy() + 1.0 / x;
    }
    return x;
}

std::uint64_t sample_logarithmic(double q, RngStream& rng) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("sample_logarithmic: q must be in (0,1)");
    double u = rng.uniform01();
    const double norm = -1.0 / std::log1p(-q);
    double term = norm * q; // P(X = 1)
    double cum = term;
    std::uint64_t r = 1;
    while (u > cum && r < 100000000ULL) {
        term *= q * static_cast<double>(r) / static_cast<double>(r + 1);
        cum += term;
        ++r;
    }
    return r;
}

} // namespace pproc
