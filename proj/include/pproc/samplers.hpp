#ifndef PPROC_SAMPLERS_HPP
#define PPROC_SAMPLERS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pproc/laws.hpp"
#include "pproc/rng.hpp"

namespace pproc {

// Piecewise-constant trajectory of a counting process.
struct JumpPath {
    std::vector<double> times;       // strictly increasing jump instants
    std::vector<std::int64_t> levels; // level reached after each jump
    std::int64_t origin_level = 0;

    std::int64_t level_at(double t) const; // right-continuous evaluation
};

using CountSampler = std::function<std::uint64_t(RngStream&)>;
using IntSampler = std::function<std::int64_t(RngStream&)>;
using RealSampler = std::function<double(RngStream&)>;

std::uint64_t sample_poisson_count(double lambda, double t, RngStream& rng);

// Thinning (acceptance) construction against the constant envelope
// rf.sup_bound; throws InvalidBound if the rate exceeds the envelope.
JumpPath sample_nonhom_poisson(const RateFunction& rf, double t, RngStream& rng);

double sample_ml_waiting_time(double nu, double lambda, RngStream& rng);
double sample_tau(unsigned k, double nu, double lambda_beta, RngStream& rng);
std::uint64_t sample_frac_poisson_count(double t, double nu, double lambda_beta,
                                        RngStream& rng);

std::int64_t sample_random_sum(const CountSampler& count, const IntSampler& jump,
                               RngStream& rng);

// Poisson path evaluated at the running level of the inner path; the output
// jumps only where the composition actually moves.
JumpPath sample_composition_path(double outer_rate, const JumpPath& inner,
                                 RngStream& rng);

std::uint64_t sample_dml(double nu, double lambda_alpha, double lambda_beta,
                         RngStream& rng);
std::uint64_t sample_yule_count(double lambda, double t, RngStream& rng);

// Inverse-CDF sampler for phi_k^nu with a precomputed log-spaced table;
// construct once, draw many times. Resolution bias is O(1/grid).
class PhiSampler {
public:
    PhiSampler(unsigned k, double nu, double lambda_beta, std::size_t grid);

    double operator()(RngStream& rng) const;

private:
    std::vector<double> ts_;
    std::vector<double> cdf_;
};

double sample_phi(unsigned k, double nu, double lambda_beta, RngStream& rng,
                  std::size_t grid);

double sample_product(double t, double lambda, const RealSampler& jump,
                      RngStream& rng);
double sample_stable_positive(double nu, RngStream& rng);
double sample_cfrac(unsigned n, RngStream& rng);
std::uint64_t sample_logarithmic(double q, RngStream& rng);

} // namespace pproc

#endif
