#include "fepool/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fepool/error.hpp"
#include "fepool/matrix.hpp"
#include "fepool/optim.hpp"
#include "fepool/stats.hpp"

namespace fepool {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double floored_sd(double sd, double floor, std::vector<std::string>& flags) {
    if (sd < floor) {
        flags.push_back("sd_floored");
        return floor;
    }
    return sd;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

} // namespace

ModelKind parse_model_kind(std::string_view name) {
    if (name == "naive") return ModelKind::Naive;
    if (name == "rw_drift") return ModelKind::RwDrift;
    if (name == "ets_aan") return ModelKind::EtsAan;
    if (name == "ar") return ModelKind::Ar;
    if (name == "garch11") return ModelKind::Garch11;
    throw ConfigError("unknown model kind: '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Naive: return "naive";
        case ModelKind::RwDrift: return "rw_drift";
        case ModelKind::EtsAan: return "ets_aan";
        case ModelKind::Ar: return "ar";
        case ModelKind::Garch11: return "garch11";
    }
    return "?";
}

std::size_t min_history(ModelKind kind, const ModelOptions& opts) {
    switch (kind) {
        case ModelKind::Naive: return 2;
        case ModelKind::RwDrift: return 3;
        case ModelKind::EtsAan: return 10;
        case ModelKind::Ar:
            return std::max<std::size_t>(3, 4 * static_cast<std::size_t>(std::max(opts.ar_max_order, 0)));
        case ModelKind::Garch11: return 50;
    }
    return 2;
}

double PredictiveDensity::log_density(double y) const {
    const double z = (y - mean) / sd;
    return -0.5 * (kLogTwoPi + z * z) - std::log(sd);
}

ModelForecast fit_predict_naive(std::span<const double> history, std::size_t horizon,
                                const ModelOptions& opts) {
    if (history.size() < 2) {
        throw DataError("naive: history length must be >= 2");
    }
    ModelForecast out;
    out.kind = ModelKind::Naive;
    const std::vector<double> d = diff(history);
    const double sigma = sample_sd(d);
    const double last = history.back();
    for (std::size_t h = 1; h <= horizon; ++h) {
        const double sd_h = floored_sd(sigma * std::sqrt(static_cast<double>(h)),
                                       opts.sd_floor, out.flags);
        out.steps.push_back({last, sd_h});
    }
    out.params = {last, sigma};
    return out;
}

ModelForecast fit_predict_rwdrift(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts) {
    if (history.size() < 3) {
        throw DataError("rw_drift: history length must be >= 3");
    }
    ModelForecast out;
    out.kind = ModelKind::RwDrift;
    const std::vector<double> d = diff(history);
    const double drift = mean(d);
    const double sigma = sample_sd(d); // sd about the drift
    const double last = history.back();
    const double n1 = static_cast<double>(history.size() - 1);
    for (std::size_t h = 1; h <= horizon; ++h) {
        const double hh = static_cast<double>(h);
        const double sd_h = floored_sd(sigma * std::sqrt(hh * (1.0 + hh / n1)),
                                       opts.sd_floor, out.flags);
        out.steps.push_back({last + hh * drift, sd_h});
    }
    out.params = {drift, sigma};
    return out;
}

// ---------------------------------------------------------------------------
// ETS(A,A,N)
// ---------------------------------------------------------------------------

namespace {

struct EtsState {
    double level;
    double trend;
    double sse;
};

EtsState ets_run(std::span<const double> y, double alpha, double beta,
                 double level0, double trend0) {
    double l = level0, b = trend0, sse = 0.0;
    for (double yt : y) {
        const double pred = l + b;
        const double e = yt - pred;
        sse += e * e;
        l = pred + alpha * e;
        b = b + beta * e;
    }
    return {l, b, sse};
}

} // namespace

EtsFit fit_ets_aan(std::span<const double> history) {
    const std::size_t n = history.size();
    if (n < 10) {
        throw DataError("ets_aan: history length must be >= 10");
    }

    // initial level/trend from a least-squares line through the first 10 points
    Matrix x(10, 2);
    std::vector<double> head(history.begin(), history.begin() + 10);
    for (std::size_t i = 0; i < 10; ++i) {
        x.at(i, 0) = 1.0;
        x.at(i, 1) = static_cast<double>(i + 1);
    }
    const std::vector<double> line = ols_solve(x, head);
    const double level0 = line[0];
    const double trend0 = line[1];

    constexpr double kAlphaLo = 1e-4, kAlphaHi = 0.9999, kBetaLo = 1e-4;
    auto objective = [&](std::span<const double> p) {
        const double a = std::clamp(p[0], kAlphaLo, kAlphaHi);
        const double b = std::clamp(p[1], kBetaLo, a);
        const double sse = ets_run(history, a, b, level0, trend0).sse;
        const double va = p[0] - a, vb = p[1] - b;
        return sse + 1e4 * (va * va + vb * vb) * (1.0 + sse);
    };

    NelderMeadOptions nm_opts;
    nm_opts.max_iterations = 500;
    nm_opts.tolerance = 1e-12;
    const NelderMeadResult nm = nelder_mead(objective, {0.1, 0.01}, 0.05, nm_opts);
    if (!nm.converged && !std::isfinite(nm.value)) {
        throw NumericError("ets_aan: optimizer failed after " + std::to_string(nm.iterations) +
                           " iterations, best value " + std::to_string(nm.value));
    }

    EtsFit fit;
    fit.alpha = std::clamp(nm.x[0], kAlphaLo, kAlphaHi);
    fit.beta = std::clamp(nm.x[1], kBetaLo, fit.alpha);
    fit.iterations = nm.iterations;
    const EtsState st = ets_run(history, fit.alpha, fit.beta, level0, trend0);
    fit.level = st.level;
    fit.trend = st.trend;
    fit.sigma = std::sqrt(st.sse / static_cast<double>(n));
    return fit;
}

ModelForecast fit_predict_ets_aan(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts) {
    const EtsFit fit = fit_ets_aan(history);
    ModelForecast out;
    out.kind = ModelKind::EtsAan;
    double var_factor = 1.0; // 1 + sum_{j=1..h-1} (alpha + beta*j)^2
    for (std::size_t h = 1; h <= horizon; ++h) {
        if (h > 1) {
            const double c = fit.alpha + fit.beta * static_cast<double>(h - 1);
            var_factor += c * c;
        }
        const double sd_h = floored_sd(fit.sigma * std::sqrt(var_factor), opts.sd_floor, out.flags);
        out.steps.push_back({fit.level + static_cast<double>(h) * fit.trend, sd_h});
    }
    out.params = {fit.alpha, fit.beta, fit.level, fit.trend, fit.sigma};
    return out;
}

// ---------------------------------------------------------------------------
// AR(p) with information-criterion order selection
// ---------------------------------------------------------------------------

namespace {

struct ArCandidate {
    std::size_t order = 0;
    std::vector<double> coef; // intercept, phi_1..phi_p
    double rss = 0.0;
};

ArCandidate fit_ar_order(std::span<const double> y, std::size_t p, std::size_t max_p) {
    const std::size_t n_eff = y.size() - max_p;
    Matrix x(n_eff, p + 1);
    std::vector<double> target(n_eff);
    for (std::size_t r = 0; r < n_eff; ++r) {
        const std::size_t t = max_p + r;
        x.at(r, 0) = 1.0;
        for (std::size_t j = 1; j <= p; ++j) x.at(r, j) = y[t - j];
        target[r] = y[t];
    }
    ArCandidate cand;
    cand.order = p;
    cand.coef = ols_solve(x, target);
    for (std::size_t r = 0; r < n_eff; ++r) {
        double pred = cand.coef[0];
        for (std::size_t j = 1; j <= p; ++j) pred += cand.coef[j] * x.at(r, j);
        const double e = target[r] - pred;
        cand.rss += e * e;
    }
    return cand;
}

/// Largest root modulus of the AR characteristic companion polynomial
/// z^p - phi_1 z^{p-1} - ... - phi_p, via Durand-Kerner. Stationary iff < 1.
double ar_max_root_modulus(std::span<const double> phi) {
    const std::size_t p = phi.size();
    if (p == 0) return 0.0;
    // monic polynomial coefficients: z^p - phi_1 z^{p-1} - ... - phi_p
    std::vector<std::complex<double>> a(p + 1);
    a[p] = 1.0;
    for (std::size_t j = 1; j <= p; ++j) a[p - j] = -phi[j - 1];
    std::vector<std::complex<double>> roots(p);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> acc(1.0, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        acc *= seed;
        roots[i] = acc;
    }
    auto eval = [&](std::complex<double> z) {
        std::complex<double> v = a[p];
        for (std::size_t j = p; j-- > 0;) v = v * z + a[j];
        return v;
    };
    for (int iter = 0; iter < 200; ++iter) {
        double move = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < p; ++j) {
                if (j != i) denom *= (roots[i] - roots[j]);
            }
            if (std::abs(denom) < 1e-30) continue;
            const std::complex<double> delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            move = std::max(move, std::abs(delta));
        }
        if (move < 1e-12) break;
    }
    double max_mod = 0.0;
    for (const auto& r : roots) max_mod = std::max(max_mod, std::abs(r));
    return max_mod;
}

} // namespace

ModelForecast fit_predict_ar(std::span<const double> history, std::size_t horizon,
                             const ModelOptions& opts) {
    const std::size_t max_p = static_cast<std::size_t>(std::max(opts.ar_max_order, 0));
    const std::size_t n = history.size();
    if (n < min_history(ModelKind::Ar, opts)) {
        throw DataError("ar: history length must be >= " +
                        std::to_string(min_history(ModelKind::Ar, opts)));
    }

    const std::size_t n_eff = n - max_p;
    std::vector<ArCandidate> cands;
    cands.reserve(max_p + 1);
    for (std::size_t p = 0; p <= max_p; ++p) {
        cands.push_back(fit_ar_order(history, p, max_p));
    }
    std::size_t best = 0;
    double best_ic = 0.0;
    const double ne = static_cast<double>(n_eff);
    for (std::size_t p = 0; p <= max_p; ++p) {
        const double rss = std::max(cands[p].rss, 1e-300);
        const double ic = ne * std::log(rss / ne) +
                          std::log(ne) * static_cast<double>(p + 1);
        if (p == 0 || ic < best_ic) {
            best_ic = ic;
            best = p;
        }
    }

    ModelForecast out;
    out.kind = ModelKind::Ar;

    // fall back to lower orders until the fitted process is stationary
    std::size_t p = best;
    while (p > 0) {
        const std::span<const double> phi(cands[p].coef.data() + 1, p);
        if (ar_max_root_modulus(phi) < 1.0) break;
        --p;
        out.flags.push_back("nonstationary_fallback");
    }
    const ArCandidate& sel = cands[p];

    const double dof = ne - static_cast<double>(p + 1);
    const double sigma = std::sqrt(sel.rss / (dof > 0.0 ? dof : ne));

    // h-step means by recursion over forecasts and observed tail
    std::vector<double> extended(history.begin(), history.end());
    std::vector<double> means(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double m = sel.coef[0];
        for (std::size_t j = 1; j <= p; ++j) m += sel.coef[j] * extended[extended.size() - j];
        extended.push_back(m);
        means[h] = m;
    }

    // psi-weight accumulation for the h-step sd
    std::vector<double> psi(horizon, 0.0);
    if (horizon > 0) psi[0] = 1.0;
    for (std::size_t j = 1; j < horizon; ++j) {
        double s = 0.0;
        for (std::size_t i = 1; i <= std::min(j, p); ++i) s += sel.coef[i] * psi[j - i];
        psi[j] = s;
    }
    double cum = 0.0;
    for (std::size_t h = 1; h <= horizon; ++h) {
        cum += psi[h - 1] * psi[h - 1];
        const double sd_h = floored_sd(sigma * std::sqrt(cum), opts.sd_floor, out.flags);
        out.steps.push_back({means[h - 1], sd_h});
    }

    out.params.push_back(static_cast<double>(p));
    out.params.insert(out.params.end(), sel.coef.begin(), sel.coef.end());
    out.params.push_back(sigma);
    return out;
}

// ---------------------------------------------------------------------------
// GARCH(1,1)
// ---------------------------------------------------------------------------

Garch11Filter garch11_filter(double mu, double omega, double alpha, double beta,
                             std::span<const double> y, double sd_floor) {
    const std::size_t n = y.size();
    Garch11Filter f;
    f.sigma2.resize(n);
    const double var_floor = sd_floor * sd_floor;

    // start the recursion at the sample variance of the series
    double sigma2 = 0.0;
    {
        const double sd0 = sample_sd(y);
        sigma2 = std::max(sd0 * sd0, var_floor);
    }
    double ll = 0.0;
    double eps_prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            sigma2 = omega + alpha * eps_prev * eps_prev + beta * sigma2;
            if (sigma2 < var_floor) sigma2 = var_floor;
        }
        f.sigma2[t] = sigma2;
        const double eps = y[t] - mu;
        ll += -0.5 * (kLogTwoPi + std::log(sigma2) + eps * eps / sigma2);
        eps_prev = eps;
    }
    f.next_sigma2 = std::max(omega + alpha * eps_prev * eps_prev + beta * f.sigma2[n - 1], var_floor);
    f.loglik = ll;
    return f;
}

double garch11_log_likelihood(double mu, double omega, double alpha, double beta,
                              std::span<const double> y, double sd_floor) {
    return garch11_filter(mu, omega, alpha, beta, y, sd_floor).loglik;
}

namespace {

struct GarchParams {
    double mu, omega, alpha, beta;
};

constexpr double kMaxPersistence = 1.0 - 1e-6;

/// theta = (mu, log omega, logit persistence, logit alpha-share)
GarchParams garch_from_theta(std::span<const double> th) {
    const double s = kMaxPersistence * sigmoid(th[2]);
    const double f = sigmoid(th[3]);
    return {th[0], std::exp(th[1]), s * f, s * (1.0 - f)};
}

} // namespace

Garch11Fit fit_garch11(std::span<const double> history, const ModelOptions& opts) {
    Garch11Fit fit;
    const std::size_t n = history.size();
    if (n < 2) {
        fit.degenerate = true;
        fit.flags.push_back("too_short");
        return fit;
    }

    const double mu0 = mean(history);
    double var0 = sample_sd(history);
    var0 = std::max(var0 * var0, opts.sd_floor * opts.sd_floor);
    const double s0 = 0.95, f0 = 0.05 / 0.95;
    std::vector<double> theta0 = {mu0, std::log(var0 * (1.0 - s0)), logit(s0 / kMaxPersistence),
                                  logit(f0)};

    auto nll = [&](std::span<const double> th) {
        const GarchParams p = garch_from_theta(th);
        return -garch11_log_likelihood(p.mu, p.omega, p.alpha, p.beta, history, opts.sd_floor);
    };
    auto value_grad = [&](std::span<const double> th, double* grad) {
        const double v = nll(th);
        if (grad != nullptr) {
            std::vector<double> p(th.begin(), th.end());
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double h = 1e-6 * (1.0 + std::abs(p[i]));
                const double orig = p[i];
                p[i] = orig + h;
                const double fp = nll(p);
                p[i] = orig - h;
                const double fm = nll(p);
                p[i] = orig;
                grad[i] = (fp - fm) / (2.0 * h);
            }
        }
        return v;
    };

    BfgsOptions bopts;
    bopts.max_iterations = 300;
    bopts.gradient_tolerance = 1e-5;
    const BfgsResult r = bfgs_minimize(value_grad, theta0, bopts);
    fit.iterations = r.iterations;

    if (!std::isfinite(r.value)) {
        fit.degenerate = true;
        fit.flags.push_back("optimizer_failure: " + r.message);
        return fit;
    }
    const GarchParams p = garch_from_theta(r.x);
    fit.mu = p.mu;
    fit.omega = p.omega;
    fit.alpha = p.alpha;
    fit.beta = p.beta;
    const Garch11Filter filt = garch11_filter(p.mu, p.omega, p.alpha, p.beta, history, opts.sd_floor);
    fit.loglik = filt.loglik;
    fit.next_sigma2 = filt.next_sigma2;
    if (p.alpha + p.beta >= kMaxPersistence - 1e-9) {
        fit.degenerate = true;
        fit.flags.push_back("persistence_boundary");
    }
    return fit;
}

ModelForecast fit_predict_garch11(std::span<const double> history, std::size_t horizon,
                                  const ModelOptions& opts) {
    if (history.size() < min_history(ModelKind::Garch11, opts)) {
        throw DataError("garch11: history length must be >= " +
                        std::to_string(min_history(ModelKind::Garch11, opts)));
    }
    const Garch11Fit fit = fit_garch11(history, opts);
    if (fit.degenerate) {
        std::string detail;
        for (const auto& f : fit.flags) detail += " " + f;
        throw NumericError("GarchDegenerate: alpha=" + std::to_string(fit.alpha) +
                           " beta=" + std::to_string(fit.beta) + " iterations=" +
                           std::to_string(fit.iterations) + detail);
    }
    ModelForecast out;
    out.kind = ModelKind::Garch11;
    double sigma2 = fit.next_sigma2;
    for (std::size_t h = 1; h <= horizon; ++h) {
        if (h > 1) sigma2 = fit.omega + (fit.alpha + fit.beta) * sigma2;
        const double sd_h = floored_sd(std::sqrt(sigma2), opts.sd_floor, out.flags);
        out.steps.push_back({fit.mu, sd_h});
    }
    out.params = {fit.mu, fit.omega, fit.alpha, fit.beta};
    return out;
}

ModelForecast fit_predict(ModelKind kind, std::span<const double> history, std::size_t horizon,
                          const ModelOptions& opts) {
    switch (kind) {
        case ModelKind::Naive: return fit_predict_naive(history, horizon, opts);
        case ModelKind::RwDrift: return fit_predict_rwdrift(history, horizon, opts);
        case ModelKind::EtsAan: return fit_predict_ets_aan(history, horizon, opts);
        case ModelKind::Ar: return fit_predict_ar(history, horizon, opts);
        case ModelKind::Garch11: return fit_predict_garch11(history, horizon, opts);
    }
    throw ConfigError("unknown model kind");
}

} // namespace fepool
