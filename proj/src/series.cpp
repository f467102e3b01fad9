#include "fepool/series.hpp"

#include <cmath>

#include "fepool/error.hpp"

namespace fepool {

void TimeSeries::validate() const {
    if (values.empty()) {
        throw DataError("EmptySeries: series '" + id + "' has no observations");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DataError("NonFiniteValue: series '" + id + "' at row " + std::to_string(i + 1));
        }
    }
    if (period < 1) {
        throw DataError("InvalidPeriod: series '" + id + "'");
    }
}

void WindowSpec::validate() const {
    if (min_length < 1) {
        throw ConfigError("min_length must be >= 1");
    }
    if (feature_window != kAll && feature_window > min_length) {
        throw ConfigError("feature_window (" + std::to_string(feature_window) +
                          ") must be <= min_length (" + std::to_string(min_length) + ") or 0 for all");
    }
}

std::span<const double> trailing_window(std::span<const double> values, std::size_t window) {
    if (window == kAll || values.size() <= window) return values;
    return values.subspan(values.size() - window);
}

std::vector<HistorySlice> history_slices(const TimeSeries& series, const WindowSpec& spec) {
    spec.validate();
    const std::size_t T = series.length();
    const std::size_t s = spec.min_length;
    if (T <= s) {
        throw DataError("InsufficientHistory: series '" + series.id + "' has length " +
                        std::to_string(T) + ", needs > " + std::to_string(s));
    }
    std::vector<HistorySlice> slices;
    slices.reserve(T - s);
    const std::span<const double> all(series.values);
    for (std::size_t t = s + 1; t <= T; ++t) {
        // history = values with 1-based index <= t-1
        slices.push_back({t, trailing_window(all.first(t - 1), spec.feature_window)});
    }
    return slices;
}

} // namespace fepool
