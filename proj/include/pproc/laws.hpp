#ifndef PPROC_LAWS_HPP
#define PPROC_LAWS_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pproc/common.hpp"

namespace pproc {

// Rates and horizon of the composition N_alpha(.) of an inner process with
// rate lambda_beta, fractional order nu.
struct CompositionParams {
    double lambda_alpha;
    double lambda_beta;
    double nu = 1.0;
    double t = 1.0;

    void validate() const;
};

// Deterministic rate of a non-homogeneous Poisson process together with its
// integral and an upper bound used by the thinning sampler.
struct RateFunction {
    std::function<double(double)> evaluator;  // lambda(t)
    std::function<double(double)> cumulative; // Lambda(t) = int_0^t lambda
    double sup_bound = 0.0;
};

// Pairwise-distinct positive birth rates lambda_1..lambda_K.
struct BirthRates {
    std::vector<double> rates;

    void validate() const; // throws DegenerateRates on near-coincident rates
};

// Finite window of a discrete law: probs[i] = P(X = offset + i), with the
// certified mass beyond the window in tail_bound.
struct PmfTable {
    std::int64_t offset = 0;
    std::vector<double> probs;
    double tail_bound = 0.0;

    double total_mass() const;
    double prob_at(std::int64_t k) const; // 0 outside the window
};

// Generic jump law of a compound representation.
struct JumpLaw {
    std::function<double(double)> pgf;
    double mean = 0.0;
    double second_moment = 0.0;
};

// ---- iterated Poisson N_alpha(N_beta(t)) ----

double iterated_poisson_pmf(unsigned k, const CompositionParams& p,
                            const SeriesAccuracy& acc = {});
double iterated_poisson_pgf(double u, const CompositionParams& p);
std::pair<double, double> iterated_poisson_moments(const CompositionParams& p);

// Central-difference residual of the difference-differential system the pmf
// satisfies; O(h^2) when the pmf is correct.
double iterated_pmf_dde_residual(unsigned k, const CompositionParams& p, double h);

double nonhom_composition_pgf(double u, const RateFunction& rf,
                              double lambda_alpha, double t);
double reversed_composition_mean(const RateFunction& rf, double lambda_alpha,
                                 double t, const SeriesAccuracy& acc = {});

// First passage of the iterated process at level k: density in s and total
// (defective) mass.
double hitting_time_density(unsigned k, double s, const CompositionParams& p,
                            const SeriesAccuracy& acc = {});
double hitting_time_total_mass(unsigned k, double lambda_alpha,
                               const SeriesAccuracy& acc = {});

// ---- fractional Poisson and its inverse tau_k^nu ----

double frac_poisson_pmf(unsigned m, double t, double nu, double lambda_beta,
                        const SeriesAccuracy& acc = {});
double tau_density(unsigned k, double s, double nu, double lambda_beta,
                   const SeriesAccuracy& acc = {});
double tau_laplace(unsigned k, double mu, double nu, double lambda_beta);

// Law of N_alpha(tau_k^nu) (Linnik-type; negative binomial at nu=1).
double composed_tau_pmf(unsigned r, unsigned k, const CompositionParams& p,
                        const SeriesAccuracy& acc = {});
double composed_tau_pgf(double u, unsigned k, const CompositionParams& p);

// Discrete Mittag-Leffler law with c = lambda_beta / lambda_alpha^nu.
double dml_pmf(unsigned r, double nu, double c, const SeriesAccuracy& acc = {});

double rescaled_tau_laplace(double k, double t, double mu, double nu,
                            double lambda_beta);

// ---- Yule process stopped at tau_k^nu ----

double yule_tau_pmf(unsigned r, unsigned k, const CompositionParams& p);
double yule_tau_pgf(double u, unsigned k, const CompositionParams& p,
                    const SeriesAccuracy& acc = {});

// (poisson_rate, log_param) of the Poisson-stopped logarithmic sum equal in
// law to N_alpha(tau_k^1).
std::pair<double, double> negbin_decomposition_params(unsigned k,
                                                      double lambda_alpha,
                                                      double lambda_beta);

// ---- nonlinear fractional birth process and phi_k^nu ----

double frac_birth_pmf(unsigned k, double t, double nu, const BirthRates& rates,
                      const SeriesAccuracy& acc = {});
double composed_birth_pgf(double u, double t, double nu, const BirthRates& rates,
                          double lambda_alpha, const SeriesAccuracy& acc = {});

double phi_density(unsigned k, double t, double nu, double lambda_beta,
                   const SeriesAccuracy& acc = {});
double phi_cdf(unsigned k, double t, double nu, double lambda_beta,
               const SeriesAccuracy& acc = {});
double composed_phi_pgf(double u, unsigned k, const CompositionParams& p);

// ---- multiplicative compound Poisson ----

double product_mellin(double eta, double t, double lambda,
                      const std::function<double(double)>& jump_mellin);
double product_covariance(double s, double t, double lambda, double jump_mean,
                          double jump_second);

// ---- Cauchy continued fractions ----

double cfrac_scale(unsigned n);
// Same scale through the golden-ratio geometric expansion
// phi + sqrt(5) sum_{j>=1} ((1-phi)/phi)^{n j}.
double cfrac_scale_expansion(unsigned n, const SeriesAccuracy& acc = {});
double cfrac_mixture_density(double x, double t, double lambda,
                             const SeriesAccuracy& acc = {});
double cfrac_charfn(double beta, double t, double lambda,
                    const SeriesAccuracy& acc = {});

// ---- tabulation ----

// Accumulates pmf(offset), pmf(offset+1), ... until the residual mass drops
// below target_tail or max_entries is reached; tail_bound = 1 - accumulated
// mass (the law must be normalized for the bound to be a certificate).
PmfTable tabulate_pmf(const std::function<double(std::int64_t)>& pmf,
                      std::int64_t offset, double target_tail,
                      std::size_t max_entries);

// Table of composed_tau_pmf. In regimes where the series representation is
// unusable the whole table is computed on one shared quadrature grid for the
// subordination integral, which is far cheaper than per-entry fallbacks.
PmfTable composed_tau_table(unsigned k, const CompositionParams& p,
                            double target_tail, std::size_t max_entries,
                            const SeriesAccuracy& acc = {});

} // namespace pproc

#endif
