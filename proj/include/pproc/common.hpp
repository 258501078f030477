#ifndef PPROC_COMMON_HPP
#define PPROC_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pproc {

// Truncation policy for all infinite series and quadratures.
struct SeriesAccuracy {
    double rel_tol = 1e-12;
    std::size_t max_terms = 1000000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw std::invalid_argument("SeriesAccuracy: rel_tol must be in (0,1)");
        if (max_terms < 1)
            throw std::invalid_argument("SeriesAccuracy: max_terms must be >= 1");
    }
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : NumericError {
    using NumericError::NumericError;
};

struct PrecisionLoss : NumericError {
    using NumericError::NumericError;
};

struct DegenerateRates : NumericError {
    using NumericError::NumericError;
};

struct OverflowError : NumericError {
    using NumericError::NumericError;
};

struct TabulationFailure : NumericError {
    using NumericError::NumericError;
};

struct InvalidBound : NumericError {
    using NumericError::NumericError;
};

struct UnknownCheck : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pproc

#endif
