#pragma once

#include <span>
#include <string>
#include <vector>

#include "fepool/density_matrix.hpp"
#include "fepool/matrix.hpp"
#include "fepool/series.hpp"

namespace fepool {

/// Ordered list of feature names; a subset of the implemented set.
struct FeatureCatalog {
    std::vector<std::string> names;

    static FeatureCatalog all(); ///< the full implemented set, fixed order
    void validate() const;       ///< nonempty, unique, known names
    std::size_t size() const { return names.size(); }
};

struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> flags;
};

/// Raw (pre-standardization) feature values for one history slice. Requires
/// length >= 13; an all-constant history yields the documented constants and
/// a "constant_series" flag.
FeatureVector compute_features(std::span<const double> history, const FeatureCatalog& catalog);

/// Feature rows aligned with the targets of history_slices. Each row depends
/// only on values before its target. Rows are independent, so the OpenMP
/// build matches build_feature_matrix_serial bit-for-bit.
struct FeatureMatrix {
    Matrix values; // (T - s) x n, raw
    std::vector<std::size_t> target_indices;
    std::vector<std::string> names;
    std::vector<std::string> flags;
};
FeatureMatrix build_feature_matrix(const TimeSeries& series, const WindowSpec& spec,
                                   const FeatureCatalog& catalog);
FeatureMatrix build_feature_matrix_serial(const TimeSeries& series, const WindowSpec& spec,
                                          const FeatureCatalog& catalog);

/// Per-row argmax of the log-density matrix; ties go to the lowest model
/// index. Labels are 0-based model indices.
std::vector<std::size_t> label_best_model(const DensityMatrix& dm);

// Individual calculators, exposed for direct verification. All are pure.

/// Lag-1 autocorrelation with the divisor-n autocovariance.
double feat_x_acf1(std::span<const double> x);
/// Lag-1 ACF of the twice-differenced series.
double feat_diff2_acf1(std::span<const double> x);
/// Sum of squared ACF values at lags 1..10 of the twice-differenced series.
double feat_diff2_acf10(std::span<const double> x);
/// Sum of squared PACF values at lags 1..5 of the differenced series.
double feat_diff1x_pacf5(std::span<const double> x);
/// Number of median crossings (values equal to the median count as below).
double feat_crossing_points(std::span<const double> x);
/// Shannon entropy of the normalized raw periodogram over nonzero Fourier
/// frequencies, scaled by log(#frequencies); 1 for a constant series.
double feat_entropy(std::span<const double> x);
/// Level-stationarity KPSS statistic, Bartlett kernel with lag
/// floor(4*(n/100)^0.25).
double feat_unitroot_kpss(std::span<const double> x);
/// max(0, 1 - Var(residual)/Var(x)) after a cubic polynomial fit in time.
double feat_trend(std::span<const double> x);
/// Terasvirta-style statistic: n*R^2 of AR(1) residuals regressed on
/// {1, y_{t-1}, y_{t-1}^2, y_{t-1}^3}.
double feat_nonlinearity(std::span<const double> x);

/// ARCH-effect statistics on a residual series z: sum of squared ACF values
/// of z^2 at lags 1..12, and the R^2 of the lag-12 squared-residual
/// regression.
struct ArchStats {
    double acf_stat = 0.0;
    double r2 = 0.0;
};
ArchStats arch_effect_stats(std::span<const double> z);

} // namespace fepool
