#pragma once

#include <string_view>
#include <vector>

#include "fepool/density_matrix.hpp"
#include "fepool/features.hpp"
#include "fepool/inference.hpp"
#include "fepool/models.hpp"
#include "fepool/pool.hpp"
#include "fepool/relieff.hpp"
#include "fepool/series.hpp"
#include "fepool/standardize.hpp"

namespace fepool {

/// Combination strategies. SA = equal weights; OP = constant weights fit by
/// intercept-only MAP; FEBAMA adds feature-driven time variation; FEBAMA_VS
/// additionally samples variable-selection indicators.
enum class Mode { Sa, Op, Febama, FebamaVs };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

/// Everything a training run needs.
struct PipelineConfig {
    std::vector<ModelKind> models;
    WindowSpec window;
    PriorConfig prior;
    InferenceConfig inference;
    ModelOptions model_options;
    FeatureCatalog candidate_catalog = FeatureCatalog::all();
    std::size_t feature_count = 6;     // k kept after ReliefF screening; 0 = intercept only
    std::size_t relieff_neighbors = 5;
    bool refit_each_step = true;       // refit component models on pseudo-extended series
    bool reselect_features = false;    // re-run screening at every origin in the oos protocol
};

/// Trained combination, sufficient to produce weights and forecasts.
struct CombinationFit {
    Mode mode = Mode::Sa;
    std::vector<ModelKind> models;
    WindowSpec window;
    PriorConfig prior;
    InferenceConfig inference;
    ModelOptions model_options;
    bool refit_each_step = true;

    FeatureCatalog catalog;            // selected features; empty for SA/OP
    StandardizationStats stats;        // frozen training standardization
    CoefficientMatrix beta;            // OP / FEBAMA point estimate
    std::vector<PosteriorDraw> draws;  // FEBAMA_VS

    double in_sample_avg_ls = 0.0;
    std::vector<std::string> flags;

    std::size_t pool_size() const { return models.size(); }
};

/// Full training pass: density matrix, feature screening (best-model labels
/// + ReliefF), standardization, then the mode's estimation step.
CombinationFit train_pipeline(const TimeSeries& series, Mode mode, const PipelineConfig& config);

/// Combination weights implied by a fit for one raw (unstandardized) feature
/// row; SA ignores the row, FEBAMA_VS averages per-draw weight vectors.
std::vector<double> fit_weights(const CombinationFit& fit, std::span<const double> raw_features);

struct ForecastStep {
    double point = 0.0;
    std::vector<double> weights;
    std::vector<PredictiveDensity> components;

    double log_density(double y) const; ///< mixture log density at y
};

struct ForecastResult {
    std::vector<ForecastStep> steps; // h = 1..H
};

/// Recursive multi-step combination forecast: each step's combined point
/// forecast is appended as a pseudo-observation, features and (by default)
/// component models are recomputed, and the next step repeats. The input
/// series is never modified.
ForecastResult forecast_h(const CombinationFit& fit, const TimeSeries& series,
                          std::size_t horizon);

struct ModeReport {
    Mode mode = Mode::Sa;
    std::vector<double> log_scores; // one per evaluated origin
    std::vector<double> points;
    Matrix weights;                 // (evaluated origins) x m
    double average_ls = 0.0;
    double mase_value = 0.0;
};

struct OosReport {
    std::size_t start_t = 0;
    std::vector<std::size_t> targets;
    std::vector<double> actuals;
    std::vector<ModeReport> modes;
};

/// Rolling-origin one-step evaluation: for each t in [start_t, T] every mode
/// is re-estimated on targets < t (warm-started from the previous origin)
/// and scored on y_t. Feature screening runs once on the initial window
/// unless config.reselect_features is set.
OosReport recursive_oos_evaluate(const TimeSeries& series, const std::vector<Mode>& modes,
                                 const PipelineConfig& config, std::size_t start_t);

} // namespace fepool
