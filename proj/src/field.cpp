#include "pproc/field.hpp"

#include <cmath>

#include "pproc/laws.hpp"

namespace pproc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

Region Region::rectangle(double x0, double y0, double x1, double y1) {
    if (!(x1 >= x0 && y1 >= y0))
        throw std::invalid_argument("Region: degenerate rectangle");
    Region r;
    r.kind = Kind::Rectangle;
    r.x0 = x0;
    r.y0 = y0;
    r.x1 = x1;
    r.y1 = y1;
    return r;
}

Region Region::disc(double cx, double cy, double radius) {
    if (!(radius >= 0.0))
        throw std::invalid_argument("Region: negative radius");
    Region r;
    r.kind = Kind::Disc;
    r.cx = cx;
    r.cy = cy;
    r.radius = radius;
    return r;
}

double Region::measure() const {
    if (kind == Kind::Rectangle) return (x1 - x0) * (y1 - y0);
    return kPi * radius * radius;
}

std::vector<Point2D> sample_field(const Region& region, double lambda,
                                  RngStream& rng) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("sample_field: rate must be positive");
    std::vector<Point2D> points;
    std::uint64_t n = rng.poisson(lambda * region.measure());
    points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (region.kind == Region::Kind::Rectangle) {
            points.push_back({region.x0 + (region.x1 - region.x0) * rng.uniform01(),
                              region.y0 + (region.y1 - region.y0) * rng.uniform01()});
        } else {
            // radius via inverse CDF keeps the law uniform on the disc
            double r = region.radius * std::sqrt(rng.uniform01());
            double theta = 2.0 * kPi * rng.uniform01();
            points.push_back({region.cx + r * std::cos(theta),
                              region.cy + r * std::sin(theta)});
        }
    }
    return points;
}

double subordinated_field_pmf(unsigned k, const Region& region, double lambda,
                              double lambda_alpha, const SeriesAccuracy& acc) {
    if (!(lambda > 0.0) || !(lambda_alpha > 0.0))
        throw std::invalid_argument("subordinated_field_pmf: rates must be positive");
    CompositionParams p{lambda_alpha, lambda, 1.0, region.measure()};
    if (region.measure() == 0.0) return k == 0 ? 1.0 : 0.0;
    return iterated_poisson_pmf(k, p, acc);
}

std::pair<double, double> first_contact(double l, double lambda,
                                        double lambda_alpha) {
    if (!(l >= 0.0))
        throw std::invalid_argument("first_contact: l must be >= 0");
    if (!(lambda > 0.0) || !(lambda_alpha > 0.0))
        throw std::invalid_argument("first_contact: rates must be positive");
    double a = lambda * kPi * (-std::expm1(-lambda_alpha));
    double cdf = -std::expm1(-a * l * l);
    double density = 2.0 * a * l * std::exp(-a * l * l);
    return {cdf, density};
}

double sample_first_contact(double lambda, double lambda_alpha, RngStream& rng) {
    if (!(lambda > 0.0) || !(lambda_alpha > 0.0))
        throw std::invalid_argument("sample_first_contact: rates must be positive");
    const double p_visible = -std::expm1(-lambda_alpha);
    // censoring radius: a visible point closer than R exists except with
    // probability e^{-14}
    const double big_r = std::sqrt(14.0 / (lambda * kPi * p_visible));
    Region window = Region::disc(0.0, 0.0, big_r);
    double best = big_r;
    for (const Point2D& pt : sample_field(window, lambda, rng)) {
        bool visible = rng.poisson(lambda_alpha) > 0;
        if (!visible) continue;
        double d = std::hypot(pt.x, pt.y);
        if (d < best) best = d;
    }
    return best;
}

} // namespace pproc
