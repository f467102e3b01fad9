#include "fepool/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fepool/error.hpp"
#include "fepool/eval.hpp"

namespace fepool {

namespace {

Matrix top_rows(const Matrix& m, std::size_t count) {
    Matrix out(count, m.cols);
    std::copy(m.data.begin(), m.data.begin() + static_cast<long>(count * m.cols),
              out.data.begin());
    return out;
}

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
    Matrix out(m.rows, cols.size());
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out.at(r, c) = m.at(r, cols[c]);
        }
    }
    return out;
}

std::vector<std::size_t> catalog_column_indices(const FeatureCatalog& catalog,
                                                const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(catalog.size());
    for (const auto& n : catalog.names) {
        const auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) {
            throw ConfigError("feature '" + n + "' missing from candidate catalog");
        }
        idx.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return idx;
}

double lse_row(std::span<const double> weights, std::span<const double> log_dens) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        terms[i] = std::log(weights[i]) + log_dens[i];
        best = std::max(best, terms[i]);
    }
    if (!std::isfinite(best)) {
        throw NumericError("NonFiniteScore: mixture density underflowed to zero");
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

std::vector<double> equal_weights(std::size_t m) {
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

std::vector<double> mean_draw_weights(const std::vector<PosteriorDraw>& draws,
                                      std::span<const double> std_features) {
    std::vector<double> w;
    for (const auto& d : draws) {
        const std::vector<double> wd = combination_weights(std_features, d.beta, &d.selection);
        if (w.empty()) {
            w = wd;
        } else {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += wd[i];
        }
    }
    const double n = static_cast<double>(draws.size());
    for (double& v : w) v /= n;
    return w;
}

} // namespace

Mode parse_mode(std::string_view name) {
    if (name == "sa") return Mode::Sa;
    if (name == "op") return Mode::Op;
    if (name == "febama") return Mode::Febama;
    if (name == "febama_vs") return Mode::FebamaVs;
    throw ConfigError("unknown mode: '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Sa: return "sa";
        case Mode::Op: return "op";
        case Mode::Febama: return "febama";
        case Mode::FebamaVs: return "febama_vs";
    }
    return "?";
}

double ForecastStep::log_density(double y) const {
    std::vector<double> log_dens(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) {
        log_dens[i] = components[i].log_density(y);
    }
    return lse_row(weights, log_dens);
}

std::vector<double> fit_weights(const CombinationFit& fit, std::span<const double> raw_features) {
    const std::size_t m = fit.pool_size();
    if (fit.mode == Mode::Sa) {
        return equal_weights(m);
    }
    if (fit.catalog.size() == 0) {
        const std::vector<double> empty;
        if (fit.mode == Mode::FebamaVs) return mean_draw_weights(fit.draws, empty);
        return combination_weights(empty, fit.beta);
    }
    if (raw_features.size() != fit.catalog.size()) {
        throw ConfigError("fit_weights: expected " + std::to_string(fit.catalog.size()) +
                          " features, got " + std::to_string(raw_features.size()));
    }
    const std::vector<double> x = apply_standardization(fit.stats, raw_features);
    if (fit.mode == Mode::FebamaVs) return mean_draw_weights(fit.draws, x);
    return combination_weights(x, fit.beta);
}

namespace {

/// In-sample weights for every density-matrix row under a fit whose feature
/// rows are already standardized.
Matrix in_sample_weights(const CombinationFit& fit, const Matrix& std_features,
                         std::size_t rows) {
    const std::size_t m = fit.pool_size();
    Matrix w(rows, m);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> wr;
        if (fit.mode == Mode::Sa) {
            wr = equal_weights(m);
        } else if (fit.mode == Mode::FebamaVs) {
            wr = mean_draw_weights(fit.draws, std_features.row(r));
        } else {
            wr = combination_weights(std_features.row(r), fit.beta);
        }
        std::copy(wr.begin(), wr.end(), w.row(r).begin());
    }
    return w;
}

} // namespace

CombinationFit train_pipeline(const TimeSeries& series, Mode mode, const PipelineConfig& config) {
    if (config.models.empty()) {
        throw ConfigError("train_pipeline: model pool is empty");
    }
    if (series.length() <= config.window.min_length + 1) {
        throw DataError("train_pipeline: series '" + series.id + "' needs length > " +
                        std::to_string(config.window.min_length + 1));
    }

    CombinationFit fit;
    fit.mode = mode;
    fit.models = config.models;
    fit.window = config.window;
    fit.prior = config.prior;
    fit.inference = config.inference;
    fit.model_options = config.model_options;
    fit.refit_each_step = config.refit_each_step;

    const DensityMatrix dm =
        build_density_matrix(series, config.models, config.window, config.model_options);
    const std::size_t rows = dm.rows();
    const std::size_t m = config.models.size();

    // feature screening (skipped for SA/OP and for intercept-only FEBAMA)
    const bool wants_features =
        (mode == Mode::Febama || mode == Mode::FebamaVs) && config.feature_count > 0;
    Matrix std_features(rows, 0);
    if (wants_features) {
        const FeatureCatalog& candidates = config.candidate_catalog;
        candidates.validate();
        if (config.feature_count > candidates.size()) {
            throw ConfigError("feature_count (" + std::to_string(config.feature_count) +
                              ") exceeds the candidate catalog size (" +
                              std::to_string(candidates.size()) + ")");
        }
        const FeatureMatrix fm = build_feature_matrix(series, config.window, candidates);
        if (config.feature_count < candidates.size()) {
            const std::vector<std::size_t> labels = label_best_model(dm);
            const Standardized full = standardize(fm.values);
            const std::vector<RankedFeature> ranked =
                relieff_rank(full.matrix, labels, config.relieff_neighbors, kAllInstances,
                             config.inference.seed, fm.names, /*lenient=*/true);
            fit.catalog = select_top_k(ranked, config.feature_count);
        } else {
            fit.catalog = candidates;
        }
        const std::vector<std::size_t> cols = catalog_column_indices(fit.catalog, fm.names);
        const Standardized sel = standardize(select_columns(fm.values, cols));
        std_features = sel.matrix;
        fit.stats = sel.stats;
    }

    switch (mode) {
        case Mode::Sa:
            break;
        case Mode::Op:
        case Mode::Febama: {
            const MapResult map = map_estimate(dm.log_density, std_features, config.prior,
                                               nullptr, config.inference);
            fit.beta = map.beta;
            break;
        }
        case Mode::FebamaVs: {
            if (fit.catalog.size() == 0) {
                throw ConfigError("febama_vs requires feature_count >= 1");
            }
            fit.draws = gibbs_select(dm.log_density, std_features, config.prior, config.inference);
            break;
        }
    }

    const Matrix w = in_sample_weights(fit, std_features, rows);
    fit.in_sample_avg_ls = pooled_log_score(dm.log_density, w) / static_cast<double>(rows);
    (void)m;
    return fit;
}

ForecastResult forecast_h(const CombinationFit& fit, const TimeSeries& series,
                          std::size_t horizon) {
    series.validate();
    if (series.length() < fit.window.min_length) {
        throw DataError("forecast_h: series shorter than the training min_length");
    }
    if (horizon < 1) {
        throw ConfigError("forecast_h: horizon must be >= 1");
    }
    const std::size_t m = fit.pool_size();

    ForecastResult out;
    out.steps.reserve(horizon);
    std::vector<double> working(series.values); // pseudo-observations appended here

    // frozen-model path: one fit per member on the observed series only
    std::vector<ModelForecast> frozen;
    if (!fit.refit_each_step) {
        for (ModelKind kind : fit.models) {
            frozen.push_back(fit_predict(
                kind, trailing_window(working, fit.window.model_window), horizon,
                fit.model_options));
        }
    }

    for (std::size_t h = 1; h <= horizon; ++h) {
        ForecastStep step;

        if (fit.mode == Mode::Sa || fit.catalog.size() == 0) {
            step.weights = fit_weights(fit, {});
        } else {
            const std::span<const double> hist =
                trailing_window(working, fit.window.feature_window);
            const FeatureVector fv = compute_features(hist, fit.catalog);
            step.weights = fit_weights(fit, fv.values);
        }

        step.components.resize(m);
        if (fit.refit_each_step) {
            for (std::size_t i = 0; i < m; ++i) {
                const ModelForecast f = fit_predict(
                    fit.models[i], trailing_window(working, fit.window.model_window), 1,
                    fit.model_options);
                step.components[i] = f.steps[0];
            }
        } else {
            for (std::size_t i = 0; i < m; ++i) step.components[i] = frozen[i].steps[h - 1];
        }

        double point = 0.0;
        for (std::size_t i = 0; i < m; ++i) point += step.weights[i] * step.components[i].mean;
        step.point = point;

        working.push_back(point);
        out.steps.push_back(std::move(step));
    }
    return out;
}

// ---------------------------------------------------------------------------
// rolling-origin evaluation
// ---------------------------------------------------------------------------

namespace {

struct ModeState {
    Mode mode;
    bool has_warm = false;
    CoefficientMatrix warm;
};

} // namespace

OosReport recursive_oos_evaluate(const TimeSeries& series, const std::vector<Mode>& modes,
                                 const PipelineConfig& config, std::size_t start_t) {
    if (modes.empty()) {
        throw ConfigError("recursive_oos_evaluate: no modes requested");
    }
    if (config.models.empty()) {
        throw ConfigError("recursive_oos_evaluate: model pool is empty");
    }
    const std::size_t s = config.window.min_length;
    const std::size_t T = series.length();
    // at least two training rows so standardization is defined
    if (start_t <= s + 2) {
        throw ConfigError("recursive_oos_evaluate: start_t must be > min_length + 2");
    }
    if (start_t > T) {
        throw ConfigError("recursive_oos_evaluate: start_t beyond the series end");
    }

    const DensityMatrix dm =
        build_density_matrix(series, config.models, config.window, config.model_options);
    const std::size_t m = config.models.size();

    const bool wants_features =
        config.feature_count > 0 &&
        std::any_of(modes.begin(), modes.end(),
                    [](Mode md) { return md == Mode::Febama || md == Mode::FebamaVs; });

    // candidate features over all rows; each row only sees history < t
    FeatureMatrix fm;
    std::vector<std::size_t> initial_labels;
    std::vector<std::size_t> sel_cols;
    Matrix sel_features;
    if (wants_features) {
        config.candidate_catalog.validate();
        if (config.feature_count > config.candidate_catalog.size()) {
            throw ConfigError("feature_count exceeds the candidate catalog size");
        }
        fm = build_feature_matrix(series, config.window, config.candidate_catalog);

        const std::size_t initial_rows = start_t - s - 1;
        if (config.feature_count < config.candidate_catalog.size()) {
            const std::vector<std::size_t> all_labels = label_best_model(dm);
            initial_labels.assign(all_labels.begin(),
                                  all_labels.begin() + static_cast<long>(initial_rows));
            const Standardized init_std = standardize(top_rows(fm.values, initial_rows));
            const std::vector<RankedFeature> ranked =
                relieff_rank(init_std.matrix, initial_labels, config.relieff_neighbors,
                             kAllInstances, config.inference.seed, fm.names, /*lenient=*/true);
            const FeatureCatalog selected = select_top_k(ranked, config.feature_count);
            sel_cols = catalog_column_indices(selected, fm.names);
        } else {
            sel_cols.resize(config.candidate_catalog.size());
            for (std::size_t i = 0; i < sel_cols.size(); ++i) sel_cols[i] = i;
        }
        sel_features = select_columns(fm.values, sel_cols);
    }

    OosReport report;
    report.start_t = start_t;
    std::vector<ModeState> states;
    for (Mode md : modes) states.push_back({md, false, {}});
    report.modes.resize(modes.size());
    const std::size_t eval_count = T - start_t + 1;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        report.modes[k].mode = modes[k];
        report.modes[k].weights = Matrix(eval_count, m);
    }
    report.targets.reserve(eval_count);
    report.actuals.reserve(eval_count);

    for (std::size_t t = start_t; t <= T; ++t) {
        const std::size_t train_rows = t - s - 1;
        const std::size_t target_row = train_rows; // density/feature row for target t
        report.targets.push_back(t);
        report.actuals.push_back(series.values[t - 1]);

        const Matrix train_density = top_rows(dm.log_density, train_rows);

        // per-origin feature re-screening is opt-in
        Matrix train_features(train_rows, 0);
        std::vector<double> target_std;
        StandardizationStats stats_t;
        if (wants_features) {
            if (config.reselect_features &&
                config.feature_count < config.candidate_catalog.size()) {
                const std::vector<std::size_t> all_labels = label_best_model(dm);
                const std::vector<std::size_t> labels(
                    all_labels.begin(), all_labels.begin() + static_cast<long>(train_rows));
                const Standardized init_std = standardize(top_rows(fm.values, train_rows));
                const std::vector<RankedFeature> ranked =
                    relieff_rank(init_std.matrix, labels, config.relieff_neighbors,
                                 kAllInstances, config.inference.seed, fm.names, true);
                sel_cols = catalog_column_indices(select_top_k(ranked, config.feature_count),
                                                  fm.names);
                sel_features = select_columns(fm.values, sel_cols);
            }
            const Standardized st = standardize(top_rows(sel_features, train_rows));
            stats_t = st.stats;
            train_features = st.matrix;
            target_std = apply_standardization(stats_t, sel_features.row(target_row));
        }

        for (std::size_t k = 0; k < modes.size(); ++k) {
            ModeState& state = states[k];
            ModeReport& mr = report.modes[k];
            std::vector<double> w;
            const bool mode_features =
                (state.mode == Mode::Febama || state.mode == Mode::FebamaVs) &&
                wants_features;

            switch (state.mode) {
                case Mode::Sa:
                    w = equal_weights(m);
                    break;
                case Mode::Op:
                case Mode::Febama: {
                    const Matrix intercept_only(train_rows, 0);
                    const Matrix& feats = mode_features ? train_features : intercept_only;
                    const MapResult map =
                        map_estimate(train_density, feats, config.prior, nullptr,
                                     config.inference, state.has_warm ? &state.warm : nullptr);
                    state.warm = map.beta;
                    state.has_warm = true;
                    w = mode_features ? combination_weights(target_std, map.beta)
                                      : combination_weights({}, map.beta);
                    break;
                }
                case Mode::FebamaVs: {
                    if (!mode_features) {
                        throw ConfigError("febama_vs requires feature_count >= 1");
                    }
                    InferenceConfig cfg = config.inference;
                    cfg.seed = config.inference.seed ^ (0x9e3779b97f4a7c15ULL * t);
                    const std::vector<PosteriorDraw> draws =
                        gibbs_select(train_density, train_features, config.prior, cfg);
                    w = mean_draw_weights(draws, target_std);
                    break;
                }
            }

            const std::size_t out_row = t - start_t;
            std::copy(w.begin(), w.end(), mr.weights.row(out_row).begin());
            mr.log_scores.push_back(lse_row(w, dm.log_density.row(target_row)));
            double point = 0.0;
            for (std::size_t i = 0; i < m; ++i) point += w[i] * dm.mean.at(target_row, i);
            mr.points.push_back(point);
        }
    }

    const std::span<const double> values(series.values);
    const std::span<const double> train_part = values.first(start_t - 1);
    const std::span<const double> actual_part = values.subspan(start_t - 1);
    for (auto& mr : report.modes) {
        mr.average_ls = average_log_score(mr.log_scores);
        mr.mase_value = mase(train_part, actual_part, mr.points);
    }
    return report;
}

} // namespace fepool
