#pragma once

#include <string>
#include <vector>

#include "fepool/matrix.hpp"
#include "fepool/models.hpp"
#include "fepool/series.hpp"

namespace fepool {

/// One-step predictive log densities log p(y_t | history, model) for every
/// forecast origin t = min_length+1 .. T and every pool member, plus the
/// Gaussian parameters behind each cell.
struct DensityMatrix {
    Matrix log_density; // (T - s) x m
    Matrix mean;
    Matrix sd;
    std::vector<std::string> model_names;
    std::vector<std::size_t> target_indices; // 1-based t per row

    std::size_t rows() const { return log_density.rows; }
    std::size_t models() const { return log_density.cols; }
};

/// Fits every model independently on the (model_window-truncated) history of
/// each target and evaluates the realized value. Cells are independent, so
/// the OpenMP build is bit-identical to build_density_matrix_serial.
DensityMatrix build_density_matrix(const TimeSeries& series, const std::vector<ModelKind>& kinds,
                                   const WindowSpec& spec, const ModelOptions& opts = {});

/// Plain double loop reference used by the tests and the benchmark.
DensityMatrix build_density_matrix_serial(const TimeSeries& series,
                                          const std::vector<ModelKind>& kinds,
                                          const WindowSpec& spec, const ModelOptions& opts = {});

} // namespace fepool
