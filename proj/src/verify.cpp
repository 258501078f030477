#include "pproc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "pproc/field.hpp"
#include "pproc/quadrature.hpp"
#include "pproc/samplers.hpp"
#include "pproc/specfun.hpp"

namespace pproc {

void Histogram::add(std::int64_t value) {
    ++total;
    std::int64_t i = value - offset;
    if (i < 0 || i >= static_cast<std::int64_t>(counts.size()))
        ++beyond;
    else
        ++counts[static_cast<std::size_t>(i)];
}

double tv_distance(const Histogram& empirical, const PmfTable& exact) {
    if (empirical.total == 0) return 1.0;
    const double n = static_cast<double>(empirical.total);
    double sum = 0.0;
    double matched = 0.0;
    for (std::size_t i = 0; i < exact.probs.size(); ++i) {
        std::int64_t k = exact.offset + static_cast<std::int64_t>(i);
        std::int64_t j = k - empirical.offset;
        double phat = 0.0;
        if (j >= 0 && j < static_cast<std::int64_t>(empirical.counts.size())) {
            phat = empirical.counts[static_cast<std::size_t>(j)] / n;
            matched += phat;
        }
        sum += std::fabs(phat - exact.probs[i]);
    }
    double emp_outside = 1.0 - matched;
    return 0.5 * sum + 0.5 * (emp_outside + exact.tail_bound);
}

double chi2_statistic(const Histogram& empirical, const PmfTable& exact,
                      std::size_t* dof_out) {
    const double n = static_cast<double>(empirical.total);
    double stat = 0.0;
    std::size_t bins = 0;
    for (std::size_t i = 0; i < exact.probs.size(); ++i) {
        double e = n * exact.probs[i];
        if (e < 5.0) continue;
        std::int64_t k = exact.offset + static_cast<std::int64_t>(i);
        std::int64_t j = k - empirical.offset;
        double o = 0.0;
        if (j >= 0 && j < static_cast<std::int64_t>(empirical.counts.size()))
            o = static_cast<double>(empirical.counts[static_cast<std::size_t>(j)]);
        stat += (o - e) * (o - e) / e;
        ++bins;
    }
    if (dof_out) *dof_out = bins > 0 ? bins - 1 : 0;
    return stat;
}

double cauchy_scale_mle(const std::vector<double>& samples) {
    if (samples.size() < 100)
        throw std::invalid_argument("cauchy_scale_mle: need at least 100 samples");
    const double n_half = 0.5 * static_cast<double>(samples.size());
    auto score = [&](double b) {
        double b2 = b * b;
        double s = 0.0;
        for (double x : samples) s += b2 / (x * x + b2);
        return s - n_half;
    };
    double lo = 1e-12, hi = 1.0;
    while (score(hi) < 0.0) {
        hi *= 4.0;
        if (hi > 1e18)
            throw NonConvergence("cauchy_scale_mle: bracket failed");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (score(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double empirical_transform(const std::vector<double>& samples,
                           TransformKind kind, double arg) {
    if (samples.empty())
        throw std::invalid_argument("empirical_transform: empty sample");
    double s = 0.0;
    for (double x : samples) {
        switch (kind) {
        case TransformKind::Laplace: s += std::exp(-arg * x); break;
        case TransformKind::Mellin: s += std::pow(x, arg - 1.0); break;
        case TransformKind::CharFn: s += std::cos(arg * x); break;
        }
    }
    return s / static_cast<double>(samples.size());
}

// ------------------------------------------------------------------
// check implementations
// ------------------------------------------------------------------

namespace {

double tv_tol(std::uint64_t n, double base = 0.005) {
    return base * std::sqrt(1e6 / static_cast<double>(n));
}

// sigma_units is always |obs-expected| divided by one third of the allowed
// deviation, so every sub-metric passes iff sigma_units <= 3.
MomentError deviation(const std::string& name, double obs, double expect,
                      double allowed) {
    MomentError e;
    e.name = name;
    e.observed = obs;
    e.expected = expect;
    e.sigma_units = std::fabs(obs - expect) / (allowed / 3.0);
    return e;
}

MomentError sigma_check(const std::string& name, double obs, double expect,
                        double se) {
    MomentError e;
    e.name = name;
    e.observed = obs;
    e.expected = expect;
    e.sigma_units = se > 0.0 ? std::fabs(obs - expect) / se : 0.0;
    return e;
}

void finalize(ComparisonReport& rep, std::size_t chi2_dof = 0) {
    bool ok = rep.tolerance == 0.0 || rep.tv_distance <= rep.tolerance;
    if (chi2_dof > 0) {
        double gate = static_cast<double>(chi2_dof) +
                      10.0 * std::sqrt(2.0 * static_cast<double>(chi2_dof));
        ok = ok && rep.chi2 <= gate;
    }
    for (const MomentError& e : rep.moment_errors)
        ok = ok && e.sigma_units <= 3.0;
    rep.passed = ok;
}

JumpPath poisson_path(double lambda, double t, RngStream& rng) {
    JumpPath path;
    double s = 0.0;
    std::int64_t level = 0;
    for (;;) {
        s += rng.exponential(lambda);
        if (s > t) return path;
        path.times.push_back(s);
        path.levels.push_back(++level);
    }
}

std::int64_t terminal(const JumpPath& path) {
    return path.levels.empty() ? 0 : path.levels.back();
}

double sample_sd(const std::vector<double>& xs, double mean) {
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

// ---- individual checks; each owns stream indices base..base+9 ----

void check_mar(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
               std::uint64_t base) {
    CompositionParams p{1.0, 1.0, 1.0, 1.0};
    PmfTable exact = tabulate_pmf(
        [&](std::int64_t k) { return iterated_poisson_pmf((unsigned)k, p); }, 0,
        1e-9, 256);
    RngStream r1(seed, base), r2(seed, base + 1);
    Histogram h1(0, exact.probs.size()), h2(0, exact.probs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        JumpPath inner = poisson_path(p.lambda_beta, p.t, r1);
        h1.add(terminal(sample_composition_path(p.lambda_alpha, inner, r1)));
        h2.add(sample_random_sum(
            [&](RngStream& g) { return g.poisson(p.lambda_beta * p.t); },
            [&](RngStream& g) {
                return (std::int64_t)g.poisson(p.lambda_alpha);
            },
            r2));
    }
    double tv1 = tv_distance(h1, exact);
    double tv2 = tv_distance(h2, exact);
    // two-sample distance via the table of the second histogram
    PmfTable emp2;
    emp2.offset = 0;
    for (std::uint64_t c : h2.counts)
        emp2.probs.push_back((double)c / (double)h2.total);
    emp2.tail_bound = (double)h2.beyond / (double)h2.total;
    double tv12 = tv_distance(h1, emp2);
    rep.n_samples = n;
    rep.tolerance = tv_tol(n);
    rep.tv_distance = std::max({tv1, tv2, tv12});
    std::size_t dof;
    rep.chi2 = chi2_statistic(h1, exact, &dof);
    finalize(rep, dof);
}

void check_ielena(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                  std::uint64_t base) {
    RateFunction rf{[](double w) { return 2.0 * w; },
                    [](double w) { return w * w; }, 2.0};
    CompositionParams p{1.0, 1.0, 1.0, 1.0}; // Lambda(1) = 1 plays lambda_beta*t
    PmfTable exact = tabulate_pmf(
        [&](std::int64_t k) { return iterated_poisson_pmf((unsigned)k, p); }, 0,
        1e-9, 256);
    RngStream rng(seed, base);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int64_t count = terminal(sample_nonhom_poisson(rf, 1.0, rng));
        std::int64_t sum = 0;
        for (std::int64_t j = 0; j < count; ++j)
            sum += (std::int64_t)rng.poisson(p.lambda_alpha);
        h.add(sum);
    }
    rep.n_samples = n;
    rep.tolerance = tv_tol(n, 0.01);
    rep.tv_distance = tv_distance(h, exact);
    std::size_t dof;
    rep.chi2 = chi2_statistic(h, exact, &dof);
    finalize(rep, dof);
}

void check_elena_dde(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                     std::uint64_t) {
    const double h = 1e-4;
    for (CompositionParams p :
         {CompositionParams{1, 1, 1, 1}, CompositionParams{0.5, 2, 1, 1}}) {
        for (unsigned k = 0; k <= 5; ++k) {
            double res = iterated_pmf_dde_residual(k, p, h);
            char name[64];
            std::snprintf(name, sizeof name, "residual-la%g-lb%g-k%u",
                          p.lambda_alpha, p.lambda_beta, k);
            rep.moment_errors.push_back(deviation(name, res, 0.0, 1e-6));
        }
    }
    finalize(rep);
}

void check_garla_mass(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                      std::uint64_t) {
    for (double la : {0.5, 1.0, 2.0}) {
        for (unsigned k = 1; k <= 5; ++k) {
            double mass = hitting_time_total_mass(k, la);
            char name[48];
            std::snprintf(name, sizeof name, "mass-below-1-la%g-k%u", la, k);
            // strict defect: mass must be in (0,1)
            double violation = (mass > 0.0 && mass < 1.0) ? 0.0 : 1.0;
            rep.moment_errors.push_back(deviation(name, violation, 0.0, 1e-12));
        }
        double m1 = hitting_time_total_mass(1, la);
        double closed = la * std::exp(-la) / (-std::expm1(-la));
        rep.moment_errors.push_back(deviation("k1-closed-form", m1 / closed, 1.0, 1e-8));
        double m2 = hitting_time_total_mass(2, la);
        double ident = m1 * m1 + 0.5 * la * m1;
        rep.moment_errors.push_back(deviation("k2-identity", m2 / ident, 1.0, 1e-8));
    }
    finalize(rep);
}

void check_sara(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                std::uint64_t) {
    BirthRates rates{{1.0, 2.0, 3.0, 4.0}};
    const double la = 1.0, t = 1.0;
    for (double nu : {0.6, 1.0}) {
        for (double u : {0.0, 0.3, 0.7}) {
            double v = std::exp(la * (u - 1.0));
            double mixed = 0.0, vr = 1.0;
            for (unsigned r = 1; r <= rates.rates.size(); ++r) {
                vr *= v;
                mixed += vr * frac_birth_pmf(r, t, nu, rates);
            }
            double direct = composed_birth_pgf(u, t, nu, rates, la);
            char name[48];
            std::snprintf(name, sizeof name, "mix-vs-pgf-nu%g-u%g", nu, u);
            rep.moment_errors.push_back(deviation(name, mixed, direct, 1e-8));
        }
    }
    finalize(rep);
}

void check_lawlin_geometric(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                            std::uint64_t) {
    const double lb = 1.0, t = 0.7;
    std::vector<double> rates;
    for (unsigned j = 1; j <= 8; ++j) rates.push_back(j * lb);
    BirthRates br{rates};
    for (unsigned k = 1; k <= 8; ++k) {
        double got = frac_birth_pmf(k, t, 1.0, br);
        double geo = std::exp(-lb * t) * std::pow(-std::expm1(-lb * t), k - 1.0);
        char name[32];
        std::snprintf(name, sizeof name, "geometric-k%u", k);
        rep.moment_errors.push_back(deviation(name, got / geo, 1.0, 1e-8));
    }
    finalize(rep);
}

void check_field_rayleigh(ComparisonReport& rep, std::uint64_t n,
                          std::uint64_t seed, std::uint64_t base) {
    const double lambda = 1.0, la = 1.0;
    std::uint64_t m = std::max<std::uint64_t>(n / 10, 1000);
    RngStream rng(seed, base);
    std::vector<double> dist(m);
    for (std::uint64_t i = 0; i < m; ++i)
        dist[i] = sample_first_contact(lambda, la, rng);
    std::sort(dist.begin(), dist.end());
    double ks = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
        double f = first_contact(dist[i], lambda, la).first;
        double lo = static_cast<double>(i) / m, hi = static_cast<double>(i + 1) / m;
        ks = std::max({ks, std::fabs(f - lo), std::fabs(f - hi)});
    }
    // emptiness probability on the unit square by direct subordination
    Region square = Region::rectangle(0, 0, 1, 1);
    double p0 = subordinated_field_pmf(0, square, lambda, la);
    RngStream rng2(seed, base + 1);
    std::uint64_t empty = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint64_t pts = rng2.poisson(lambda * square.measure());
        if (rng2.poisson(la * static_cast<double>(pts)) == 0) ++empty;
    }
    double phat = static_cast<double>(empty) / static_cast<double>(n);
    double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
    rep.n_samples = n;
    rep.tv_distance = ks;
    rep.tolerance = 0.005 * std::sqrt(1e5 / static_cast<double>(m));
    rep.moment_errors.push_back(sigma_check("emptiness", phat, p0, se));
    finalize(rep);
}

void check_car_pgf_duality(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                           std::uint64_t) {
    CompositionParams p{1.5, 1.0, 0.6, 1.0};
    const unsigned k = 2;
    PmfTable table = composed_tau_table(k, p, 1e-12, 4000);
    for (double u : {0.0, 0.3, 0.7}) {
        double sum = 0.0, up = 1.0;
        for (std::size_t r = 0; r < table.probs.size(); ++r) {
            sum += up * table.probs[r];
            up *= u;
            if (up == 0.0) break;
        }
        char name[32];
        std::snprintf(name, sizeof name, "duality-u%g", u);
        rep.moment_errors.push_back(
            deviation(name, sum, composed_tau_pgf(u, k, p), 1e-6));
    }
    finalize(rep);
}

// Coarsening map for heavy-tailed supports: width-2 bins below 128, then
// eight geometric sub-bins per octave. Keeps every bin's mass large enough
// that the distance is not dominated by sampling noise spread over thousands
// of near-empty bins.
std::int64_t coarse_bin(std::int64_t r) {
    if (r < 128) return r / 2;
    double l = std::log2(static_cast<double>(r));
    return 64 + static_cast<std::int64_t>((l - 7.0) * 8.0);
}

void check_dml_sum(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                   std::uint64_t base) {
    // fractional case: three-fold sum of discrete Mittag-Leffler variables
    const double nu = 0.7, la = 4.0, lb = 1.0;
    const unsigned k = 3;
    CompositionParams p{la, lb, nu, 1.0};
    PmfTable fine = composed_tau_table(k, p, 1e-3, 20000);
    PmfTable exact;
    exact.offset = 0;
    exact.tail_bound = fine.tail_bound;
    for (std::size_t i = 0; i < fine.probs.size(); ++i) {
        std::size_t b = (std::size_t)coarse_bin((std::int64_t)i);
        if (b >= exact.probs.size()) exact.probs.resize(b + 1, 0.0);
        exact.probs[b] += fine.probs[i];
    }
    const std::int64_t fine_end = (std::int64_t)fine.probs.size();
    RngStream rng(seed, base);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int64_t sum = 0;
        for (unsigned j = 0; j < k; ++j)
            sum += (std::int64_t)sample_dml(nu, la, lb, rng);
        // draws beyond the tabulated range belong to the certified tail
        h.add(sum < fine_end ? coarse_bin(sum) : fine_end + 128);
    }
    // The table is normalized, so the tail is one more cell of the partition
    // and the exact coarsened TV compares it against the beyond count (the
    // generic bound would add the two and swamp the tolerance).
    double tv1 = 0.0;
    for (std::size_t b = 0; b < exact.probs.size(); ++b)
        tv1 += std::fabs((double)h.counts[b] / (double)n - exact.probs[b]);
    tv1 += std::fabs((double)h.beyond / (double)n - exact.tail_bound);
    tv1 *= 0.5;
    // nu = 1 subcase: the sum must be negative binomial
    CompositionParams p2{1.0, 1.0, 1.0, 1.0};
    PmfTable exact2 = composed_tau_table(2, p2, 1e-9, 512);
    RngStream rng2(seed, base + 1);
    Histogram h2(0, exact2.probs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int64_t sum = (std::int64_t)sample_dml(1.0, 1.0, 1.0, rng2) +
                           (std::int64_t)sample_dml(1.0, 1.0, 1.0, rng2);
        h2.add(sum);
    }
    double tv2 = tv_distance(h2, exact2);
    rep.n_samples = n;
    rep.tolerance = tv_tol(n);
    rep.tv_distance = std::max(tv1, tv2);
    std::size_t dof;
    rep.chi2 = chi2_statistic(h2, exact2, &dof);
    finalize(rep, dof);
}

void check_viewnew(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                   std::uint64_t base) {
    const double la = 1.0, lb = 2.0;
    for (unsigned k : {1u, 2u, 5u}) {
        CompositionParams p{la, lb, 1.0, 1.0};
        double lp = std::log(lb / (la + lb)), lq = std::log(la / (la + lb));
        for (unsigned r = 0; r <= 30; ++r) {
            double got = composed_tau_pmf(r, k, p);
            double nb = std::exp(std::lgamma((double)k + r) -
                                 std::lgamma((double)k) - std::lgamma(r + 1.0) +
                                 k * lp + r * lq);
            char name[32];
            std::snprintf(name, sizeof name, "negbin-k%u-r%u", k, r);
            rep.moment_errors.push_back(deviation(name, got / nb, 1.0, 1e-8));
        }
    }
    // Monte Carlo side at k=2
    CompositionParams p{la, lb, 1.0, 1.0};
    PmfTable exact = composed_tau_table(2, p, 1e-9, 512);
    RngStream rng(seed, base);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int64_t sum = (std::int64_t)sample_dml(1.0, la, lb, rng) +
                           (std::int64_t)sample_dml(1.0, la, lb, rng);
        h.add(sum);
    }
    rep.n_samples = n;
    rep.tolerance = tv_tol(n);
    rep.tv_distance = tv_distance(h, exact);
    std::size_t dof;
    rep.chi2 = chi2_statistic(h, exact, &dof);
    finalize(rep, dof);
}

void check_dueparole(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                     std::uint64_t base) {
    const unsigned k = 2;
    const double la = 1.0, lb = 1.0;
    auto [mu, q] = negbin_decomposition_params(k, la, lb);
    CompositionParams p{la, lb, 1.0, 1.0};
    PmfTable exact = composed_tau_table(k, p, 1e-9, 512);
    RngStream rng(seed, base);
    Histogram h(0, exact.probs.size());
    for (std::uint64_t i = 0; i < n; ++i)
        h.add(sample_random_sum(
            [&](RngStream& g) { return g.poisson(mu); },
            [&](RngStream& g) { return (std::int64_t)sample_logarithmic(q, g); },
            rng));
    rep.n_samples = n;
    rep.tolerance = tv_tol(n);
    rep.tv_distance = tv_distance(h, exact);
    std::size_t dof;
    rep.chi2 = chi2_statistic(h, exact, &dof);
    finalize(rep, dof);
}

void check_media_varianza(ComparisonReport& rep, std::uint64_t n,
                          std::uint64_t seed, std::uint64_t base) {
    const unsigned k = 2;
    const double la = 1.5, lb = 2.0;
    RngStream rng(seed, base);
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i)
        xs[i] = (double)rng.poisson(la * sample_tau(k, 1.0, lb, rng));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= (double)n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= (double)n;
    m4 /= (double)n;
    double wald_mean = k * la / lb;
    double wald_var = k * la * (la + lb) / (lb * lb);
    double se_mean = std::sqrt(m2 / (double)n);
    double se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / (double)n);
    rep.n_samples = n;
    rep.moment_errors.push_back(sigma_check("wald-mean", mean, wald_mean, se_mean));
    rep.moment_errors.push_back(sigma_check("wald-variance", m2, wald_var, se_var));
    finalize(rep);
}

void check_bottnew_maus(ComparisonReport& rep, std::uint64_t n,
                        std::uint64_t seed, std::uint64_t base) {
    // closed Beta form at lambda_alpha = lambda_beta
    CompositionParams eq{1.0, 1.0, 1.0, 1.0};
    for (unsigned r = 1; r <= 30; ++r) {
        double got = yule_tau_pmf(r, 1, eq);
        double beta = 1.0 / ((double)r * (r + 1.0));
        char name[32];
        std::snprintf(name, sizeof name, "beta-r%u", r);
        rep.moment_errors.push_back(deviation(name, got / beta, 1.0, 1e-8));
    }
    // partial mass plus the exact residual 1/(R+1)
    double mass = 0.0;
    for (unsigned r = 1; r <= 300; ++r) mass += yule_tau_pmf(r, 1, eq);
    rep.moment_errors.push_back(
        deviation("unit-mass", mass + 1.0 / 301.0, 1.0, 1e-6));
    // general-rate Beta identity
    CompositionParams gen{1.0, 2.0, 1.0, 1.0};
    for (unsigned r = 1; r <= 20; ++r) {
        double got = yule_tau_pmf(r, 1, gen);
        double beta = 2.0 * std::exp(std::lgamma((double)r) + std::lgamma(3.0) -
                                     std::lgamma(r + 3.0));
        char name[32];
        std::snprintf(name, sizeof name, "maus-r%u", r);
        rep.moment_errors.push_back(deviation(name, got / beta, 1.0, 1e-8));
    }
    // Monte Carlo: Yule at an Erlang passage time, lambda_beta > lambda_alpha
    CompositionParams mc{1.0, 4.0, 1.0, 1.0};
    PmfTable exact = tabulate_pmf(
        [&](std::int64_t r) { return yule_tau_pmf((unsigned)r, 1, mc); }, 1,
        1e-9, 1500);
    RngStream rng(seed, base);
    Histogram h(1, exact.probs.size());
    std::vector<double> ys(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double s = sample_tau(1, 1.0, mc.lambda_beta, rng);
        std::uint64_t y = sample_yule_count(mc.lambda_alpha, s, rng);
        h.add((std::int64_t)y);
        ys[i] = (double)y;
    }
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= (double)n;
    double expect = mc.lambda_beta / (mc.lambda_beta - mc.lambda_alpha);
    rep.moment_errors.push_back(
        sigma_check("yule-mean", mean, expect,
                    sample_sd(ys, mean) / std::sqrt((double)n)));
    rep.n_samples = n;
    rep.tolerance = tv_tol(n);
    rep.tv_distance = tv_distance(h, exact);
    std::size_t dof;
    rep.chi2 = chi2_statistic(h, exact, &dof);
    finalize(rep, dof);
}

void check_phi_beta_pgf(ComparisonReport& rep, std::uint64_t n,
                        std::uint64_t seed, std::uint64_t base) {
    const double u = 0.3;
    for (double nu : {0.5, 0.8}) {
        CompositionParams p{1.0, 1.0, nu, 1.0};
        for (unsigned k = 1; k <= 10; ++k) {
            double finite = 0.0, sign = 1.0;
            for (unsigned l = 1; l <= k; ++l) {
                double binom = std::exp(std::lgamma(k + 1.0) -
                                        std::lgamma(l + 1.0) -
                                        std::lgamma((double)(k - l + 1)));
                finite += sign * binom * p.lambda_beta * l /
                          (std::pow(p.lambda_alpha * (1.0 - u), nu) +
                           p.lambda_beta * l);
                sign = -sign;
            }
            char name[32];
            std::snprintf(name, sizeof name, "beta-form-nu%g-k%u", nu, k);
            rep.moment_errors.push_back(
                deviation(name, finite, composed_phi_pgf(u, k, p), 1e-10));
        }
        rep.moment_errors.push_back(
            deviation("tau-phi-k1", composed_phi_pgf(u, 1, p),
                      composed_tau_pgf(u, 1, p), 1e-12));
    }
    // composition moment at nu = 1 (harmonic mean of the passage time)
    const unsigned k = 2;
    const double la = 1.5, lb = 1.0;
    PhiSampler phi(k, 1.0, lb, 1 << 14);
    RngStream rng(seed, base);
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i)
        xs[i] = (double)rng.poisson(la * phi(rng));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= (double)n;
    double expect = la * (1.0 + 0.5) / lb;
    rep.n_samples = n;
    rep.moment_errors.push_back(sigma_check(
        "poisson-phi-mean", mean, expect, sample_sd(xs, mean) / std::sqrt((double)n)));
    finalize(rep);
}

void check_treccani(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                    std::uint64_t base) {
    const double lambda = 1.0, t = 1.0, p = 0.4;
    RngStream rng(seed, base);
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i)
        xs[i] = sample_product(
            t, lambda,
            [&](RngStream& g) { return g.uniform01() < p ? 1.0 : 0.0; }, rng);
    double expect = std::exp(-lambda * t * (1.0 - p));
    for (double eta : {2.0, 3.0}) {
        double obs = empirical_transform(xs, TransformKind::Mellin, eta);
        // Bernoulli jumps make X^{eta-1} = X: same spread for every eta
        double se = std::sqrt(expect * (1.0 - expect) / (double)n);
        char name[32];
        std::snprintf(name, sizeof name, "mellin-eta%g", eta);
        rep.moment_errors.push_back(sigma_check(name, obs, expect, se));
    }
    rep.n_samples = n;
    finalize(rep);
}

void check_bianca(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                  std::uint64_t base) {
    const double lambda = 1.0, s = 0.5, t = 1.0;
    RngStream rng(seed, base);
    std::vector<double> as(n), bs(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double prod_s = 1.0;
        std::uint64_t n1 = rng.poisson(lambda * s);
        for (std::uint64_t j = 0; j < n1; ++j) prod_s *= rng.normal();
        double prod_t = prod_s;
        std::uint64_t n2 = rng.poisson(lambda * (t - s));
        for (std::uint64_t j = 0; j < n2; ++j) prod_t *= rng.normal();
        as[i] = prod_s;
        bs[i] = prod_t;
    }
    double ma = 0.0, mb = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        ma += as[i];
        mb += bs[i];
    }
    ma /= (double)n;
    mb /= (double)n;
    double cov = 0.0, var_d = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) cov += (as[i] - ma) * (bs[i] - mb);
    cov /= (double)n;
    for (std::uint64_t i = 0; i < n; ++i) {
        double d = (as[i] - ma) * (bs[i] - mb) - cov;
        var_d += d * d;
    }
    double se = std::sqrt(var_d / (double)n) / std::sqrt((double)n);
    double right = product_covariance(s, t, lambda, 0.0, 1.0);
    double wrong = 2.0 * std::sinh(lambda * s) * std::exp(-lambda * s);
    rep.n_samples = n;
    rep.moment_errors.push_back(sigma_check("covariance", cov, right, se));
    // the min/min variant must be rejected by at least six sigma
    MomentError rejected;
    rejected.name = "reject-min-variant";
    rejected.observed = std::fabs(cov - wrong) / se;
    rejected.expected = 6.0;
    rejected.sigma_units = rejected.observed >= 6.0 ? 0.0 : 10.0;
    rep.moment_errors.push_back(rejected);
    finalize(rep);
}

void check_bernoulli_product(ComparisonReport& rep, std::uint64_t n,
                             std::uint64_t seed, std::uint64_t base) {
    const double lambda = 2.0, t = 0.5, p = 0.25;
    RngStream rng(seed, base);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < n; ++i)
        sum += sample_product(
            t, lambda,
            [&](RngStream& g) { return g.uniform01() < p ? 1.0 : 0.0; }, rng);
    double obs = sum / (double)n;
    double expect = std::exp(-lambda * t * (1.0 - p));
    double se = std::sqrt(expect * (1.0 - expect) / (double)n);
    rep.n_samples = n;
    rep.moment_errors.push_back(sigma_check("bernoulli-mean", obs, expect, se));
    rep.moment_errors.push_back(
        deviation("mellin-law", product_mellin(7.0, t, lambda, [&](double) {
                      return p; // E X^{eta-1} = p for every eta > 1
                  }),
                  expect, 1e-12));
    finalize(rep);
}

// One percent at 10^6 draws; wider for smaller runs where the asymptotic
// MLE spread sqrt(2/n) alone exceeds it.
double mle_band(std::uint64_t n) {
    return 0.01 * std::max(1.0, std::sqrt(1e6 / static_cast<double>(n)));
}

void check_teo98(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                 std::uint64_t base) {
    RngStream rng(seed, base);
    std::vector<double> xs(n);
    for (unsigned depth = 1; depth <= 10; ++depth) {
        for (std::uint64_t i = 0; i < n; ++i) xs[i] = sample_cfrac(depth, rng);
        double got = cauchy_scale_mle(xs);
        double expect = cfrac_scale(depth);
        char name[32];
        std::snprintf(name, sizeof name, "scale-n%u", depth);
        rep.moment_errors.push_back(deviation(name, got / expect, 1.0, mle_band(n)));
    }
    rep.n_samples = n;
    finalize(rep);
}

void check_baffioni(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                    std::uint64_t) {
    for (unsigned m = 1; m <= 30; ++m) {
        char name[32];
        std::snprintf(name, sizeof name, "product-form-n%u", m);
        rep.moment_errors.push_back(deviation(
            name, cfrac_scale_expansion(m) / cfrac_scale(m), 1.0, 1e-12));
    }
    // characteristic function evaluated with expansion scales vs directly
    const double beta = 1.0, t = 3.0, lambda = 2.0;
    double mu = lambda * t;
    double alt = 0.0, cum = 0.0;
    for (unsigned m = 0; m <= 200; ++m) {
        double w = std::exp(m * std::log(mu) - mu - std::lgamma(m + 1.0));
        double b = m == 0 ? 1.0 : cfrac_scale_expansion(m);
        alt += w * std::exp(-beta * b);
        cum += w;
    }
    alt += (1.0 - cum) * std::exp(-beta * 1.618033988749894848);
    rep.moment_errors.push_back(
        deviation("charfn", alt, cfrac_charfn(beta, t, lambda), 1e-10));
    finalize(rep);
}

void check_stilo(ComparisonReport& rep, std::uint64_t n, std::uint64_t seed,
                 std::uint64_t base) {
    const unsigned depth = 8;
    const double fn = (double)fibonacci(depth);      // F_8 = 21
    const std::uint64_t fn1 = fibonacci(depth + 1);  // F_9 = 34
    RngStream r1(seed, base), r2(seed, base + 1);
    std::vector<double> xs(n), ys(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        xs[i] = sample_cfrac(depth, r1);
        double sum = 0.0;
        for (std::uint64_t j = 0; j < fn1; ++j) sum += r2.cauchy(1.0 / fn);
        ys[i] = sum;
    }
    double s1 = cauchy_scale_mle(xs);
    double s2 = cauchy_scale_mle(ys);
    rep.n_samples = n;
    rep.moment_errors.push_back(
        deviation("scale-agreement", s1 / s2, 1.0, mle_band(n)));
    rep.moment_errors.push_back(
        deviation("scale-value", s2 / cfrac_scale(depth), 1.0, mle_band(n)));
    finalize(rep);
}

void check_piripi(ComparisonReport& rep, std::uint64_t, std::uint64_t,
                  std::uint64_t) {
    const double lb = 1.0, t = 1.0, nu = 0.5;
    for (double mu : {0.5, 1.0, 2.0}) {
        double got = rescaled_tau_laplace(1e6, t, mu, nu, lb);
        double limit = std::exp(-lb * t * std::pow(mu, nu));
        char name[32];
        std::snprintf(name, sizeof name, "stable-limit-mu%g", mu);
        rep.moment_errors.push_back(deviation(name, got, limit, 1e-5));
    }
    finalize(rep);
}

struct CheckEntry {
    const char* name;
    void (*fn)(ComparisonReport&, std::uint64_t, std::uint64_t, std::uint64_t);
};

// Alphabetical; the stream base is derived from the position so that adding
// a check never silently re-seeds its neighbours' streams.
const CheckEntry kRegistry[] = {
    {"baffioni-product-form", check_baffioni},
    {"bernoulli-product", check_bernoulli_product},
    {"bianca", check_bianca},
    {"bottnew-maus", check_bottnew_maus},
    {"car-pgf-duality", check_car_pgf_duality},
    {"dml-sum", check_dml_sum},
    {"dueparole", check_dueparole},
    {"elena-dde", check_elena_dde},
    {"field-rayleigh", check_field_rayleigh},
    {"garla-mass", check_garla_mass},
    {"ielena", check_ielena},
    {"lawlin-geometric", check_lawlin_geometric},
    {"mar", check_mar},
    {"media-varianza", check_media_varianza},
    {"phi-beta-pgf", check_phi_beta_pgf},
    {"piripi", check_piripi},
    {"sara", check_sara},
    {"stilo", check_stilo},
    {"teo98", check_teo98},
    {"treccani", check_treccani},
    {"viewnew", check_viewnew},
};

} // namespace

std::vector<std::string> registered_checks() {
    std::vector<std::string> names;
    for (const CheckEntry& e : kRegistry) names.push_back(e.name);
    return names;
}

ComparisonReport run_identity_check(const std::string& name, std::uint64_t n,
                                    std::uint64_t seed) {
    if (n < 10000)
        throw std::invalid_argument("run_identity_check: need n >= 10^4");
    const CheckEntry* entry = nullptr;
    std::uint64_t ordinal = 0;
    for (std::size_t i = 0; i < std::size(kRegistry); ++i) {
        if (name == kRegistry[i].name) {
            entry = &kRegistry[i];
            ordinal = i;
            break;
        }
    }
    if (!entry) throw UnknownCheck("unknown check: " + name);
    ComparisonReport rep;
    rep.check_name = name;
    rep.seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    entry->fn(rep, n, seed, 1000 + 100 * ordinal);
    auto t1 = std::chrono::steady_clock::now();
    rep.runtime_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    return rep;
}

std::vector<ComparisonReport> run_all_checks(std::uint64_t n, std::uint64_t seed,
                                             unsigned threads) {
    const std::size_t total = std::size(kRegistry);
    std::vector<ComparisonReport> reports(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            reports[i] = run_identity_check(kRegistry[i].name, n, seed);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    // registry is alphabetical already; keep the contract explicit
    std::sort(reports.begin(), reports.end(),
              [](const ComparisonReport& a, const ComparisonReport& b) {
                  return a.check_name < b.check_name;
              });
    return reports;
}

// ------------------------------------------------------------------
// serialization
// ------------------------------------------------------------------

namespace {

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string report_to_json(const ComparisonReport& r) {
    std::string s = "{";
    s += "\"check_name\":\"" + r.check_name + "\",";
    s += "\"n_samples\":" + std::to_string(r.n_samples) + ",";
    s += "\"tv_distance\":" + num17(r.tv_distance) + ",";
    s += "\"chi2\":" + num17(r.chi2) + ",";
    s += "\"moment_errors\":[";
    for (std::size_t i = 0; i < r.moment_errors.size(); ++i) {
        const MomentError& e = r.moment_errors[i];
        if (i) s += ",";
        s += "{\"name\":\"" + e.name + "\",\"observed\":" + num17(e.observed) +
             ",\"expected\":" + num17(e.expected) +
             ",\"sigma_units\":" + num17(e.sigma_units) + "}";
    }
    s += "],";
    s += "\"tolerance\":" + num17(r.tolerance) + ",";
    s += std::string("\"passed\":") + (r.passed ? "true" : "false") + ",";
    s += "\"seed\":" + std::to_string(r.seed) + ",";
    s += "\"runtime_ms\":" + std::to_string(r.runtime_ms) + "}";
    return s;
}

std::string reports_to_csv(const std::vector<ComparisonReport>& reports) {
    std::string s =
        "check_name,n_samples,tv_distance,chi2,tolerance,passed,seed,"
        "runtime_ms,moment_errors\n";
    for (const ComparisonReport& r : reports) {
        s += r.check_name + "," + std::to_string(r.n_samples) + "," +
             num17(r.tv_distance) + "," + num17(r.chi2) + "," +
             num17(r.tolerance) + "," + (r.passed ? "true" : "false") + "," +
             std::to_string(r.seed) + "," + std::to_string(r.runtime_ms) + ",\"";
        for (std::size_t i = 0; i < r.moment_errors.size(); ++i) {
            const MomentError& e = r.moment_errors[i];
            if (i) s += ";";
            s += e.name + ":" + num17(e.observed) + ":" + num17(e.expected) +
                 ":" + num17(e.sigma_units);
        }
        s += "\"\n";
    }
    return s;
}

} // namespace pproc
