#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fepool/matrix.hpp"

namespace fepool {

/// Per-column mean and sample sd (n-1 divisor) frozen at training time so
/// forecast-time features are scaled with training statistics. Columns with
/// sd == 0 are flagged constant and standardize to zero.
struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<std::uint8_t> constant;

    std::size_t size() const { return mean.size(); }
};

struct Standardized {
    Matrix matrix;
    StandardizationStats stats;
};

/// Column-wise standardization to mean 0 / sd 1. Requires >= 2 rows.
Standardized standardize(const Matrix& matrix);

/// Applies previously computed stats; column count must match.
Matrix apply_standardization(const StandardizationStats& stats, const Matrix& matrix);
std::vector<double> apply_standardization(const StandardizationStats& stats,
                                          std::span<const double> row);

} // namespace fepool
