#ifndef PPROC_QUADRATURE_HPP
#define PPROC_QUADRATURE_HPP

#include <cstddef>
#include <functional>

namespace pproc {

// Globally adaptive Gauss-Kronrod (G7,K15) integration on a finite interval.
// Subdivides the worst interval until the summed error estimate drops below
// max(abs_tol, rel_tol*|integral|) or the evaluation budget runs out.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-11, double abs_tol = 0.0,
                 std::size_t max_intervals = 4000);

// Nodes/weights of an n-point Gauss-Legendre rule mapped to [a,b].
// n must be 16 (the only size the library needs for batched quadrature).
void gauss_legendre_16(double a, double b, double* nodes, double* weights);

} // namespace pproc

#endif
