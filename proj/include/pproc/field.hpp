#ifndef PPROC_FIELD_HPP
#define PPROC_FIELD_HPP

#include <utility>
#include <vector>

#include "pproc/common.hpp"
#include "pproc/rng.hpp"

namespace pproc {

// Planar observation window: axis-aligned rectangle or disc.
struct Region {
    enum class Kind { Rectangle, Disc };
    Kind kind = Kind::Rectangle;
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0; // rectangle corners
    double cx = 0.0, cy = 0.0, radius = 1.0;       // disc

    static Region rectangle(double x0, double y0, double x1, double y1);
    static Region disc(double cx, double cy, double radius);

    double measure() const; // Lebesgue measure Lambda(B)
};

struct Point2D {
    double x, y;
};

// Homogeneous Poisson field restricted to the region.
std::vector<Point2D> sample_field(const Region& region, double lambda,
                                  RngStream& rng);

// Counts of a Poisson process evaluated at the field count on B; the inner
// mean lambda_beta*t of the iterated law becomes lambda*Lambda(B).
double subordinated_field_pmf(unsigned k, const Region& region, double lambda,
                              double lambda_alpha, const SeriesAccuracy& acc = {});

// First-contact distance to the nearest visible point: (cdf, density) at l.
std::pair<double, double> first_contact(double l, double lambda,
                                        double lambda_alpha);

// Distance from the origin to the nearest field point whose attached
// Poisson(lambda_alpha) mark is positive; infinity-free by construction (the
// field is sampled on a disc large enough that a visible point is almost
// surely inside).
double sample_first_contact(double lambda, double lambda_alpha, RngStream& rng);

} // namespace pproc

#endif
