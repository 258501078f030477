#ifndef PPROC_VERIFY_HPP
#define PPROC_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pproc/laws.hpp"

namespace pproc {

// One empirical-vs-expected scalar comparison inside a check.
struct MomentError {
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double sigma_units = 0.0; // |observed - expected| in units of its tolerance
};

struct ComparisonReport {
    std::string check_name;
    std::uint64_t n_samples = 0;
    double tv_distance = 0.0;
    double chi2 = 0.0;
    std::vector<MomentError> moment_errors;
    double tolerance = 0.0;
    bool passed = false;
    std::uint64_t seed = 0;
    std::uint64_t runtime_ms = 0;
};

// Empirical counts of an integer-valued sample.
struct Histogram {
    std::int64_t offset = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t beyond = 0; // draws outside [offset, offset+counts.size())
    std::uint64_t total = 0;

    explicit Histogram(std::int64_t offset_ = 0, std::size_t size = 0)
        : offset(offset_), counts(size, 0) {}

    void add(std::int64_t value);
};

// (1/2) sum |phat - p| over the table window plus (1/2)(empirical mass
// outside the window + certified tail mass).
double tv_distance(const Histogram& empirical, const PmfTable& exact);

// Pearson statistic over the window bins with expected count >= 5; dof_out
// (optional) receives the bin count minus one.
double chi2_statistic(const Histogram& empirical, const PmfTable& exact,
                      std::size_t* dof_out = nullptr);

// Maximum-likelihood scale of a centered Cauchy sample (bisection on the
// monotone score equation).
double cauchy_scale_mle(const std::vector<double>& samples);

enum class TransformKind { Laplace, Mellin, CharFn };

// Sample mean of e^{-arg X}, X^{arg-1}, or cos(arg X) respectively.
double empirical_transform(const std::vector<double>& samples,
                           TransformKind kind, double arg);

// All registered check names, sorted.
std::vector<std::string> registered_checks();

// Runs one named identity check; throws UnknownCheck for unknown names.
// Results depend only on (name, n, seed).
ComparisonReport run_identity_check(const std::string& name, std::uint64_t n,
                                    std::uint64_t seed);

// Runs every registered check on `threads` workers; the returned reports are
// sorted by name and independent of the thread count.
std::vector<ComparisonReport> run_all_checks(std::uint64_t n, std::uint64_t seed,
                                             unsigned threads);

// Serialization used by the CLI and golden files; 17 significant digits.
std::string report_to_json(const ComparisonReport& report);
std::string reports_to_csv(const std::vector<ComparisonReport>& reports);

} // namespace pproc

#endif
