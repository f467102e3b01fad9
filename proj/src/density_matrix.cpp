#include "fepool/density_matrix.hpp"

#include <string>

#include "fepool/error.hpp"
#include "fepool/parallel.hpp"

namespace fepool {

namespace {

struct CellTask {
    std::size_t row;
    std::size_t col;
};

DensityMatrix prepare(const TimeSeries& series, const std::vector<ModelKind>& kinds,
                      const WindowSpec& spec, const ModelOptions& opts) {
    series.validate();
    spec.validate();
    if (kinds.empty()) {
        throw ConfigError("density matrix: model pool is empty");
    }
    const std::size_t T = series.length();
    const std::size_t s = spec.min_length;
    if (T <= s) {
        throw DataError("InsufficientHistory: series '" + series.id + "' has length " +
                        std::to_string(T) + ", needs > " + std::to_string(s));
    }
    for (ModelKind k : kinds) {
        if (min_history(k, opts) > s) {
            throw ConfigError(std::string("model '") + std::string(to_string(k)) +
                              "' needs history >= " + std::to_string(min_history(k, opts)) +
                              " but min_length is " + std::to_string(s));
        }
    }
    DensityMatrix dm;
    const std::size_t rows = T - s;
    dm.log_density = Matrix(rows, kinds.size());
    dm.mean = Matrix(rows, kinds.size());
    dm.sd = Matrix(rows, kinds.size());
    dm.target_indices.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) dm.target_indices[r] = s + 1 + r;
    for (ModelKind k : kinds) dm.model_names.emplace_back(to_string(k));
    return dm;
}

void fill_cell(DensityMatrix& dm, const TimeSeries& series, const std::vector<ModelKind>& kinds,
               const WindowSpec& spec, const ModelOptions& opts, std::size_t row, std::size_t col) {
    const std::size_t t = dm.target_indices[row];
    const std::span<const double> all(series.values);
    const std::span<const double> history = trailing_window(all.first(t - 1), spec.model_window);
    const ModelForecast f = fit_predict(kinds[col], history, 1, opts);
    dm.mean.at(row, col) = f.steps[0].mean;
    dm.sd.at(row, col) = f.steps[0].sd;
    dm.log_density.at(row, col) = f.steps[0].log_density(series.values[t - 1]);
}

} // namespace

DensityMatrix build_density_matrix(const TimeSeries& series, const std::vector<ModelKind>& kinds,
                                   const WindowSpec& spec, const ModelOptions& opts) {
    DensityMatrix dm = prepare(series, kinds, spec, opts);
    const std::size_t rows = dm.rows();
    const std::size_t cols = dm.models();

    // errors are collected per cell and the first one (row-major) rethrown,
    // so failure behavior does not depend on thread scheduling
    std::vector<std::string> errors(rows * cols);
    parallel_for(rows * cols, [&](std::size_t cell) {
        const std::size_t r = cell / cols;
        const std::size_t c = cell % cols;
        try {
            fill_cell(dm, series, kinds, spec, opts, r, c);
        } catch (const std::exception& e) {
            errors[cell] = e.what();
        }
    });
    for (std::size_t cell = 0; cell < errors.size(); ++cell) {
        if (!errors[cell].empty()) {
            const std::size_t r = cell / cols;
            const std::size_t c = cell % cols;
            throw NumericError("density matrix cell (t=" + std::to_string(dm.target_indices[r]) +
                               ", model=" + dm.model_names[c] + "): " + errors[cell]);
        }
    }
    return dm;
}

DensityMatrix build_density_matrix_serial(const TimeSeries& series,
                                          const std::vector<ModelKind>& kinds,
                                          const WindowSpec& spec, const ModelOptions& opts) {
    DensityMatrix dm = prepare(series, kinds, spec, opts);
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        for (std::size_t c = 0; c < dm.models(); ++c) {
            try {
                fill_cell(dm, series, kinds, spec, opts, r, c);
            } catch (const std::exception& e) {
                throw NumericError("density matrix cell (t=" + std::to_string(dm.target_indices[r]) +
                                   ", model=" + dm.model_names[c] + "): " + e.what());
            }
        }
    }
    return dm;
}

} // namespace fepool
