#include "movnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace movnet {

LogLinearFit fit_log_linear(std::span<const double> t, std::span<const double> y) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        const double ly = std::log(y[i]);
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        ++k;
    }
    LogLinearFit fit;
    if (k < 2) return fit;
    const double n = static_cast<double>(k);
    const double denom = n * stt - st * st;
    if (denom == 0.0) return fit;
    fit.slope = (n * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / n;
    fit.points = k;
    return fit;
}

void RunningStats::add(double value) {
    ++count_;
    const double d = value - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (value - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double total = static_cast<double>(count_ + other.count_);
    const double d = other.mean_ - mean_;
    mean_ += d * static_cast<double>(other.count_) / total;
    m2_ += other.m2_ + d * d * static_cast<double>(count_) * static_cast<double>(other.count_) / total;
    count_ += other.count_;
}

double RunningStats::variance() const noexcept {
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::standard_error() const noexcept {
    return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

double median(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace movnet
