#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fepool {

/// Sentinel meaning "no window, use the full history".
inline constexpr std::size_t kAll = 0;

/// An ordered univariate series. Values are in the raw units of the data
/// (e.g. percent log returns); time indices are 1-based throughout.
struct TimeSeries {
    std::string id;
    std::vector<double> values;
    std::size_t period = 1;

    std::size_t length() const { return values.size(); }

    /// Throws DataError unless length >= 1, all values finite, period >= 1.
    void validate() const;
};

/// Windowing policy: min_length is the shortest history before any forecast
/// target is produced; feature_window / model_window truncate the history
/// used for feature computation and model re-estimation respectively.
struct WindowSpec {
    std::size_t min_length = 25;
    std::size_t feature_window = kAll;
    std::size_t model_window = kAll;

    /// Throws ConfigError on min_length < 1 or feature_window > min_length.
    void validate() const;
};

/// History available for forecasting target t: values with index <= t-1,
/// optionally truncated to the trailing `window` values.
struct HistorySlice {
    std::size_t target;                // 1-based index of the value being forecast
    std::span<const double> history;   // strictly earlier values
};

/// Last `window` elements of `values` (all of them when window == kAll).
std::span<const double> trailing_window(std::span<const double> values, std::size_t window);

/// One slice per target t = min_length+1 .. T. Slices view the series'
/// storage; the series must outlive them. Throws DataError when T <= min_length.
std::vector<HistorySlice> history_slices(const TimeSeries& series, const WindowSpec& spec);

} // namespace fepool
