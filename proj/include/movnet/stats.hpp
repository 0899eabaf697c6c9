#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace movnet {

/// Least-squares line log(y) = intercept + slope * t.
struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Fits log(y) against t, skipping non-positive y. Returns points == 0 (and
/// zero coefficients) when fewer than two usable points exist.
LogLinearFit fit_log_linear(std::span<const double> t, std::span<const double> y);

/// Running mean / variance accumulator (Welford).
class RunningStats {
public:
    void add(double value);
    void merge(const RunningStats& other);

    std::size_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept;
    double standard_error() const noexcept;

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Median of the finite values in `values`; NaN if there are none.
double median(std::vector<double> values);

}  // namespace movnet
