#include "fepool/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "fepool/error.hpp"
#include "fepool/models.hpp"
#include "fepool/parallel.hpp"
#include "fepool/stats.hpp"

namespace fepool {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_constant(std::span<const double> x) {
    for (double v : x) {
        if (v != x.front()) return false;
    }
    return true;
}

std::vector<double> demean(std::span<const double> x) {
    const double mu = mean(x);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mu;
    return out;
}

std::vector<double> second_diff(std::span<const double> x) {
    const std::vector<double> d1 = diff(x);
    return diff(d1);
}

} // namespace

double feat_x_acf1(std::span<const double> x) {
    const std::vector<double> r = acf(x, 1);
    return r[0];
}

double feat_diff2_acf1(std::span<const double> x) {
    const std::vector<double> d2 = second_diff(x);
    return acf(d2, 1)[0];
}

double feat_diff2_acf10(std::span<const double> x) {
    const std::vector<double> d2 = second_diff(x);
    const std::vector<double> r = acf(d2, 10);
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

double feat_diff1x_pacf5(std::span<const double> x) {
    const std::vector<double> d1 = diff(x);
    const std::vector<double> p = pacf(d1, 5);
    double s = 0.0;
    for (double v : p) s += v * v;
    return s;
}

double feat_crossing_points(std::span<const double> x) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = (n % 2 == 1) ? sorted[n / 2]
                                       : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::size_t crossings = 0;
    bool prev_above = x[0] > median; // values equal to the median count as below
    for (std::size_t i = 1; i < x.size(); ++i) {
        const bool above = x[i] > median;
        if (above != prev_above) ++crossings;
        prev_above = above;
    }
    return static_cast<double>(crossings);
}

double feat_entropy(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t m = n / 2;
    if (m == 0) return 1.0;
    std::vector<double> pgram(m);
    double total = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double w = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        double c = 0.0, s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            c += x[t] * std::cos(w * static_cast<double>(t));
            s += x[t] * std::sin(w * static_cast<double>(t));
        }
        pgram[j - 1] = (c * c + s * s) / static_cast<double>(n);
        total += pgram[j - 1];
    }
    if (total <= 0.0) return 1.0; // flat spectrum convention for constants
    double h = 0.0;
    for (double v : pgram) {
        const double p = v / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(m));
}

double feat_unitroot_kpss(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::vector<double> e = demean(x);
    double cum = 0.0, eta = 0.0, gamma0 = 0.0;
    for (double v : e) {
        cum += v;
        eta += cum * cum;
        gamma0 += v * v;
    }
    const double nn = static_cast<double>(n);
    eta /= nn * nn;
    gamma0 /= nn;
    if (gamma0 <= 0.0) return 0.0;
    const std::size_t lags =
        static_cast<std::size_t>(std::floor(4.0 * std::pow(nn / 100.0, 0.25)));
    double lrv = gamma0;
    for (std::size_t h = 1; h <= lags && h < n; ++h) {
        double gh = 0.0;
        for (std::size_t t = h; t < n; ++t) gh += e[t] * e[t - h];
        gh /= nn;
        lrv += 2.0 * (1.0 - static_cast<double>(h) / static_cast<double>(lags + 1)) * gh;
    }
    if (lrv <= 0.0) return 0.0;
    return eta / lrv;
}

double feat_trend(std::span<const double> x) {
    const std::size_t n = x.size();
    const double var_y = sample_sd(x);
    if (var_y <= 0.0) return 0.0;

    // cubic polynomial in scaled time; scaling keeps the design well-conditioned
    Matrix design(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) /
                         std::max(1.0, 0.5 * static_cast<double>(n - 1));
        design.at(i, 0) = 1.0;
        design.at(i, 1) = t;
        design.at(i, 2) = t * t;
        design.at(i, 3) = t * t * t;
    }
    const std::vector<double> coef = ols_solve(design, x);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < 4; ++j) fit += coef[j] * design.at(i, j);
        resid[i] = x[i] - fit;
    }
    const double var_r = sample_sd(resid);
    const double ratio = (var_r * var_r) / (var_y * var_y);
    return std::clamp(1.0 - ratio, 0.0, 1.0);
}

double feat_nonlinearity(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 5) return 0.0;
    const std::size_t rows = n - 1;

    // AR(1) residuals
    Matrix ar_design(rows, 2);
    std::vector<double> target(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        ar_design.at(i, 0) = 1.0;
        ar_design.at(i, 1) = x[i];
        target[i] = x[i + 1];
    }
    const std::vector<double> ar_coef = ols_solve(ar_design, target);
    std::vector<double> resid(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        resid[i] = target[i] - ar_coef[0] - ar_coef[1] * x[i];
    }

    // regress residuals on {1, y, y^2, y^3}
    Matrix design(rows, 4);
    for (std::size_t i = 0; i < rows; ++i) {
        design.at(i, 0) = 1.0;
        design.at(i, 1) = x[i];
        design.at(i, 2) = x[i] * x[i];
        design.at(i, 3) = x[i] * x[i] * x[i];
    }
    const std::vector<double> coef = ols_solve(design, resid);
    std::vector<double> fitted(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < 4; ++j) f += coef[j] * design.at(i, j);
        fitted[i] = f;
    }
    return static_cast<double>(rows) * r_squared(resid, fitted);
}

ArchStats arch_effect_stats(std::span<const double> z) {
    constexpr std::size_t kLags = 12;
    ArchStats out;
    const std::size_t n = z.size();
    std::vector<double> z2(n);
    for (std::size_t i = 0; i < n; ++i) z2[i] = z[i] * z[i];

    const std::vector<double> r = acf(z2, kLags);
    for (double v : r) out.acf_stat += v * v;

    if (n <= kLags + 1) return out;
    const std::size_t rows = n - kLags;
    Matrix design(rows, kLags + 1);
    std::vector<double> target(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        design.at(i, 0) = 1.0;
        for (std::size_t l = 1; l <= kLags; ++l) design.at(i, l) = z2[i + kLags - l];
        target[i] = z2[i + kLags];
    }
    const std::vector<double> coef = ols_solve(design, target);
    std::vector<double> fitted(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j <= kLags; ++j) f += coef[j] * design.at(i, j);
        fitted[i] = f;
    }
    out.r2 = r_squared(target, fitted);
    return out;
}

// ---------------------------------------------------------------------------
// catalog & dispatch
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& implemented_names() {
    static const std::vector<std::string> names = {
        "alpha",        "arch_acf",  "arch_r2",      "beta",
        "crossing_points", "diff1x_pacf5", "diff2_acf1", "diff2_acf10",
        "entropy",      "garch_acf", "garch_r2",     "nonlinearity",
        "trend",        "unitroot_kpss", "x_acf1",
    };
    return names;
}

/// Values shared between several features so the slice is processed once.
struct SliceContext {
    std::span<const double> x;
    bool constant = false;
    bool ets_done = false;
    EtsFit ets;
    bool arch_done = false;
    ArchStats arch;
    bool garch_done = false;
    ArchStats garch;
    bool garch_fallback = false;

    const EtsFit& ets_fit() {
        if (!ets_done) {
            ets = fit_ets_aan(x);
            ets_done = true;
        }
        return ets;
    }

    const ArchStats& arch_stats() {
        if (!arch_done) {
            const std::vector<double> z = demean(x);
            arch = arch_effect_stats(z);
            arch_done = true;
        }
        return arch;
    }

    const ArchStats& garch_stats() {
        if (!garch_done) {
            const std::vector<double> z = demean(x);
            const Garch11Fit fit = fit_garch11(z);
            std::vector<double> std_resid(z.size());
            if (fit.degenerate) {
                // fall back to constant-variance scaling
                garch_fallback = true;
                double sd = sample_sd(z);
                if (sd <= 0.0) sd = 1.0;
                for (std::size_t i = 0; i < z.size(); ++i) std_resid[i] = z[i] / sd;
            } else {
                const Garch11Filter filt =
                    garch11_filter(fit.mu, fit.omega, fit.alpha, fit.beta, z);
                for (std::size_t i = 0; i < z.size(); ++i) {
                    std_resid[i] = (z[i] - fit.mu) / std::sqrt(filt.sigma2[i]);
                }
            }
            garch = arch_effect_stats(std_resid);
            garch_done = true;
        }
        return garch;
    }
};

double feature_value(const std::string& name, SliceContext& ctx) {
    if (ctx.constant) {
        // documented conventions for degenerate input
        if (name == "entropy") return 1.0;
        if (name == "alpha") return 1e-4;
        if (name == "beta") return 1e-4;
        return 0.0;
    }
    if (name == "alpha") return ctx.ets_fit().alpha;
    if (name == "beta") return ctx.ets_fit().beta;
    if (name == "arch_acf") return ctx.arch_stats().acf_stat;
    if (name == "arch_r2") return ctx.arch_stats().r2;
    if (name == "crossing_points") return feat_crossing_points(ctx.x);
    if (name == "diff1x_pacf5") return feat_diff1x_pacf5(ctx.x);
    if (name == "diff2_acf1") return feat_diff2_acf1(ctx.x);
    if (name == "diff2_acf10") return feat_diff2_acf10(ctx.x);
    if (name == "entropy") return feat_entropy(ctx.x);
    if (name == "garch_acf") return ctx.garch_stats().acf_stat;
    if (name == "garch_r2") return ctx.garch_stats().r2;
    if (name == "nonlinearity") return feat_nonlinearity(ctx.x);
    if (name == "trend") return feat_trend(ctx.x);
    if (name == "unitroot_kpss") return feat_unitroot_kpss(ctx.x);
    if (name == "x_acf1") return feat_x_acf1(ctx.x);
    throw ConfigError("unknown feature: '" + name + "'");
}

bool needs_ets(const FeatureCatalog& catalog) {
    for (const auto& n : catalog.names) {
        if (n == "alpha" || n == "beta") return true;
    }
    return false;
}

} // namespace

FeatureCatalog FeatureCatalog::all() {
    return {implemented_names()};
}

void FeatureCatalog::validate() const {
    if (names.empty()) {
        throw ConfigError("feature catalog is empty");
    }
    std::unordered_set<std::string> seen;
    const auto& known = implemented_names();
    for (const auto& n : names) {
        if (!seen.insert(n).second) {
            throw ConfigError("duplicate feature: '" + n + "'");
        }
        if (std::find(known.begin(), known.end(), n) == known.end()) {
            throw ConfigError("unknown feature: '" + n + "'");
        }
    }
}

FeatureVector compute_features(std::span<const double> history, const FeatureCatalog& catalog) {
    catalog.validate();
    std::size_t min_len = 13; // lag-10 ACF of the twice-differenced series
    if (needs_ets(catalog)) min_len = std::max<std::size_t>(min_len, 10);
    if (history.size() < min_len) {
        throw DataError("compute_features: history length " + std::to_string(history.size()) +
                        " below minimum " + std::to_string(min_len));
    }
    FeatureVector out;
    SliceContext ctx;
    ctx.x = history;
    ctx.constant = is_constant(history);
    if (ctx.constant) out.flags.push_back("constant_series");
    out.values.reserve(catalog.size());
    for (const auto& name : catalog.names) {
        const double v = feature_value(name, ctx);
        if (!std::isfinite(v)) {
            throw NumericError("feature '" + name + "' is not finite");
        }
        out.values.push_back(v);
    }
    if (ctx.garch_fallback) out.flags.push_back("garch_fallback");
    return out;
}

namespace {

FeatureMatrix prepare_feature_matrix(const TimeSeries& series, const WindowSpec& spec,
                                     const FeatureCatalog& catalog) {
    catalog.validate();
    FeatureMatrix fm;
    const std::vector<HistorySlice> slices = history_slices(series, spec);
    fm.values = Matrix(slices.size(), catalog.size());
    fm.target_indices.reserve(slices.size());
    for (const auto& s : slices) fm.target_indices.push_back(s.target);
    fm.names = catalog.names;
    return fm;
}

} // namespace

FeatureMatrix build_feature_matrix(const TimeSeries& series, const WindowSpec& spec,
                                   const FeatureCatalog& catalog) {
    FeatureMatrix fm = prepare_feature_matrix(series, spec, catalog);
    const std::vector<HistorySlice> slices = history_slices(series, spec);
    std::vector<std::string> errors(slices.size());
    std::vector<std::uint8_t> flagged(slices.size(), 0);
    parallel_for(slices.size(), [&](std::size_t r) {
        try {
            const FeatureVector fv = compute_features(slices[r].history, catalog);
            std::copy(fv.values.begin(), fv.values.end(), fm.values.row(r).begin());
            flagged[r] = fv.flags.empty() ? 0 : 1;
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    });
    for (std::size_t r = 0; r < slices.size(); ++r) {
        if (!errors[r].empty()) {
            throw NumericError("features at t=" + std::to_string(slices[r].target) + ": " +
                               errors[r]);
        }
        if (flagged[r]) {
            fm.flags.push_back("t=" + std::to_string(slices[r].target));
        }
    }
    return fm;
}

FeatureMatrix build_feature_matrix_serial(const TimeSeries& series, const WindowSpec& spec,
                                          const FeatureCatalog& catalog) {
    FeatureMatrix fm = prepare_feature_matrix(series, spec, catalog);
    const std::vector<HistorySlice> slices = history_slices(series, spec);
    for (std::size_t r = 0; r < slices.size(); ++r) {
        try {
            const FeatureVector fv = compute_features(slices[r].history, catalog);
            std::copy(fv.values.begin(), fv.values.end(), fm.values.row(r).begin());
            if (!fv.flags.empty()) fm.flags.push_back("t=" + std::to_string(slices[r].target));
        } catch (const std::exception& e) {
            throw NumericError("features at t=" + std::to_string(slices[r].target) + ": " + e.what());
        }
    }
    return fm;
}

std::vector<std::size_t> label_best_model(const DensityMatrix& dm) {
    std::vector<std::size_t> labels(dm.rows());
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < dm.models(); ++c) {
            if (dm.log_density.at(r, c) > dm.log_density.at(r, best)) best = c;
        }
        labels[r] = best;
    }
    return labels;
}

} // namespace fepool
