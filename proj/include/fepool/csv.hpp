#pragma once

#include <string>
#include <vector>

#include "fepool/series.hpp"

namespace fepool {

struct LoadResult {
    TimeSeries series;
    std::size_t skipped_rows = 0;
};

/// Reads one series from a CSV file (UTF-8, header row required, '.' decimal
/// point, row order = time order). With skip_bad_rows, rows whose cell is
/// empty or non-numeric are dropped and counted; otherwise they are errors.
LoadResult load_series(const std::string& path, const std::string& column,
                       bool skip_bad_rows = false);

/// Long-format loader: splits rows on `id_column`, one TimeSeries per id in
/// order of first appearance. With an empty id_column behaves like
/// load_series and returns a single entry.
std::vector<LoadResult> load_series_file(const std::string& path, const std::string& column,
                                         const std::string& id_column,
                                         bool skip_bad_rows = false);

} // namespace fepool
