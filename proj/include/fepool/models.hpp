#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fepool {

enum class ModelKind { Naive, RwDrift, EtsAan, Ar, Garch11 };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

struct ModelOptions {
    double sd_floor = 1e-8;
    int ar_max_order = 5;
};

/// Shortest history a model accepts.
std::size_t min_history(ModelKind kind, const ModelOptions& opts = {});

/// Gaussian one-step-ahead (or h-step-ahead) predictive density.
struct PredictiveDensity {
    double mean = 0.0;
    double sd = 1.0;

    double log_density(double y) const;
};

/// Result of fitting a model and forecasting horizons 1..H.
struct ModelForecast {
    ModelKind kind;
    std::vector<PredictiveDensity> steps;
    std::vector<double> params;      // kind-specific, see fit functions
    std::vector<std::string> flags;  // degeneracies worth surfacing (sd floored, ...)
};

/// Last value carried forward; sd_h = sd(first differences) * sqrt(h).
ModelForecast fit_predict_naive(std::span<const double> history, std::size_t horizon,
                                const ModelOptions& opts = {});

/// Random walk with drift: mean_h = last + h*drift,
/// sd_h = sigma * sqrt(h * (1 + h/(n-1))).
ModelForecast fit_predict_rwdrift(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts = {});

/// Additive-error, additive-trend, non-seasonal exponential smoothing fit.
/// alpha/beta minimize the one-step in-sample squared error; initial level
/// and trend come from a least-squares line through the first 10 points.
struct EtsFit {
    double alpha = 0.0;
    double beta = 0.0;
    double level = 0.0;   // final state
    double trend = 0.0;
    double sigma = 0.0;   // one-step residual sd, sqrt(SSE/n)
    int iterations = 0;
};

/// Fits the smoothing parameters with bounded Nelder-Mead from the fixed
/// start (0.1, 0.01); alpha in [1e-4, 0.9999], beta in [1e-4, alpha].
/// Throws NumericError with an optimizer trace if the search fails.
EtsFit fit_ets_aan(std::span<const double> history);

ModelForecast fit_predict_ets_aan(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts = {});

/// AR(p) with intercept, order chosen by information criterion over
/// 0..max_order on a common estimation sample; non-stationary fits fall back
/// to lower orders. params = {p, intercept, phi_1..phi_p, sigma}.
ModelForecast fit_predict_ar(std::span<const double> history, std::size_t horizon,
                             const ModelOptions& opts = {});

/// Gaussian GARCH(1,1) internals, shared with the feature calculators.
struct Garch11Fit {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double loglik = 0.0;
    double next_sigma2 = 0.0;  // one-step-ahead conditional variance
    bool degenerate = false;   // persistence at the boundary or optimizer failure
    int iterations = 0;
    std::vector<std::string> flags;
};

/// Conditional variance recursion started from the sample variance of y.
/// Returns the in-sample sigma^2 path plus the one-step-ahead variance.
struct Garch11Filter {
    std::vector<double> sigma2;
    double next_sigma2 = 0.0;
    double loglik = 0.0;
};
Garch11Filter garch11_filter(double mu, double omega, double alpha, double beta,
                             std::span<const double> y, double sd_floor = 1e-8);

double garch11_log_likelihood(double mu, double omega, double alpha, double beta,
                              std::span<const double> y, double sd_floor = 1e-8);

/// Maximum likelihood fit in an unconstrained parametrization
/// (mu, log omega, logistic persistence and its alpha/beta split), started
/// from (alpha, beta) = (0.05, 0.90). Never throws: failures are reported
/// through `degenerate`.
Garch11Fit fit_garch11(std::span<const double> history, const ModelOptions& opts = {});

/// Throws NumericError("GarchDegenerate...") when the fit is unusable.
ModelForecast fit_predict_garch11(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts = {});

ModelForecast fit_predict(ModelKind kind, std::span<const double> history, std::size_t horizon,
                          const ModelOptions& opts = {});

} // namespace fepool
