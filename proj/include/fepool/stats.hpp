#pragma once

#include <span>
#include <vector>

#include "fepool/matrix.hpp"

namespace fepool {

double mean(std::span<const double> x);

/// Sample standard deviation with the n-1 divisor; 0 for n < 2.
double sample_sd(std::span<const double> x);

/// First differences x_t - x_{t-1}; result has size n-1.
std::vector<double> diff(std::span<const double> x);

/// Autocovariance at lag h with divisor n (biased estimator).
double autocovariance(std::span<const double> x, std::size_t lag);

/// ACF values for lags 1..max_lag as c_h / c_0. A zero-variance series maps
/// to all-zero ACF.
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// Partial autocorrelations for lags 1..max_lag via Durbin-Levinson on the
/// ACF sequence; values clamped to [-1, 1].
std::vector<double> pacf(std::span<const double> x, std::size_t max_lag);

/// Least squares for the normal equations of y ~ X (X includes any intercept
/// column). Solves with Gaussian elimination and a tiny ridge term for
/// near-singular designs. Returns the coefficient vector.
std::vector<double> ols_solve(const Matrix& x, std::span<const double> y);

/// R-squared of y against fitted values, clamped to [0, 1]; 0 when y has no
/// variance.
double r_squared(std::span<const double> y, std::span<const double> fitted);

/// Solves the dense system a * x = b in place (a and b are clobbered).
/// Gaussian elimination with partial pivoting; throws NumericError when the
/// matrix is singular to working precision.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

} // namespace fepool
