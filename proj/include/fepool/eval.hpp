#pragma once

#include <span>

namespace fepool {

/// Mean absolute scaled error: forecast MAE over the horizon divided by the
/// in-sample one-step naive MAE of the training series. Throws NumericError
/// ("DegenerateScale") on a constant training series.
double mase(std::span<const double> train, std::span<const double> actuals,
            std::span<const double> forecasts);

/// Arithmetic mean of realized log densities; throws on empty input.
double average_log_score(std::span<const double> log_densities);

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool degenerate = false; // zero-variance loss differential (or clamped variance)
};

/// Two-sided Diebold-Mariano test on the loss differential loss_a - loss_b.
/// Long-run variance uses truncated uniform weights over lags 0..horizon-1,
/// the Harvey small-sample factor is applied, and the p-value comes from a
/// Student-t with n-1 degrees of freedom. Identical losses return
/// (0, 1, degenerate); a negative variance estimate clamps to the lag-0
/// value and is flagged.
DmResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b,
                 std::size_t horizon);

} // namespace fepool
