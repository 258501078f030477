#ifndef PPROC_SPECFUN_HPP
#define PPROC_SPECFUN_HPP

#include <cstdint>

#include "pproc/common.hpp"

namespace pproc {

/// Arguments of the two-parameter Mittag-Leffler function E_{nu,beta}(z).
struct MlArgs {
    double nu;   // order, in (0,1]
    double beta; // second parameter, > 0
    double z;

    void validate() const;
};

/// E_{nu,beta}(z) = sum_{r>=0} z^r / Gamma(nu r + beta).
///
/// Evaluation strategy: guarded power series wherever it is numerically
/// safe; for negative arguments with 0<nu<1 where the alternating series
/// cancels catastrophically, the branch-cut integral representation of the
/// inverse Laplace transform; far in the left tail, the asymptotic
/// expansion. Desk-scale real arguments only.
double mittag_leffler(const MlArgs& args, const SeriesAccuracy& acc = {});

/// Three-parameter (Prabhakar) Mittag-Leffler function:
/// sum_{r>=0} (delta)_r z^r / (Gamma(xi r + gamma) r!).
double generalized_ml(double xi, double gamma, double delta, double z,
                      const SeriesAccuracy& acc = {});

/// Bell (Touchard) polynomial B_k(x) = e^{-x} sum_{r>=0} r^k x^r / r!,
/// i.e. the k-th moment of a Poisson(x) variable.
double bell_polynomial(unsigned k, double x, const SeriesAccuracy& acc = {});

/// Generalized binomial coefficient a(a-1)...(a-j+1)/j! for real a.
double signed_binomial(double a, unsigned j);

/// Exact Fibonacci numbers, F_1 = F_2 = 1. Throws OverflowError for n > 92.
std::uint64_t fibonacci(unsigned n);

/// F_{n+1}/F_n, exact within the 64-bit range and the golden-ratio limit
/// beyond it (the ratio has long since converged there).
double fibonacci_ratio(unsigned n);

} // namespace pproc

#endif
