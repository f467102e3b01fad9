#include "fepool/standardize.hpp"

#include <cmath>

#include "fepool/error.hpp"

namespace fepool {

Standardized standardize(const Matrix& matrix) {
    if (matrix.rows < 2) {
        throw DataError("standardize: need at least 2 rows, got " + std::to_string(matrix.rows));
    }
    StandardizationStats stats;
    stats.mean.resize(matrix.cols);
    stats.sd.resize(matrix.cols);
    stats.constant.resize(matrix.cols);
    const double n = static_cast<double>(matrix.rows);
    for (std::size_t c = 0; c < matrix.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < matrix.rows; ++r) sum += matrix.at(r, c);
        const double mu = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < matrix.rows; ++r) {
            const double d = matrix.at(r, c) - mu;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        stats.mean[c] = mu;
        stats.sd[c] = sd;
        stats.constant[c] = sd == 0.0 ? 1 : 0;
    }
    return {apply_standardization(stats, matrix), std::move(stats)};
}

Matrix apply_standardization(const StandardizationStats& stats, const Matrix& matrix) {
    if (matrix.cols != stats.size()) {
        throw ConfigError("apply_standardization: column count mismatch");
    }
    Matrix out(matrix.rows, matrix.cols);
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        for (std::size_t c = 0; c < matrix.cols; ++c) {
            out.at(r, c) = stats.constant[c] ? 0.0 : (matrix.at(r, c) - stats.mean[c]) / stats.sd[c];
        }
    }
    return out;
}

std::vector<double> apply_standardization(const StandardizationStats& stats,
                                          std::span<const double> row) {
    if (row.size() != stats.size()) {
        throw ConfigError("apply_standardization: column count mismatch");
    }
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
        out[c] = stats.constant[c] ? 0.0 : (row[c] - stats.mean[c]) / stats.sd[c];
    }
    return out;
}

} // namespace fepool
