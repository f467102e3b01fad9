#include "fepool/eval.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "fepool/error.hpp"

namespace fepool {

double mase(std::span<const double> train, std::span<const double> actuals,
            std::span<const double> forecasts) {
    if (train.size() < 2) {
        throw DataError("mase: training series needs length >= 2");
    }
    if (actuals.empty() || actuals.size() != forecasts.size()) {
        throw ConfigError("mase: actuals and forecasts must be nonempty and equal length");
    }
    double scale = 0.0;
    for (std::size_t t = 1; t < train.size(); ++t) {
        scale += std::abs(train[t] - train[t - 1]);
    }
    scale /= static_cast<double>(train.size() - 1);
    if (scale == 0.0) {
        throw NumericError("DegenerateScale: constant training series");
    }
    double err = 0.0;
    for (std::size_t h = 0; h < actuals.size(); ++h) {
        err += std::abs(forecasts[h] - actuals[h]);
    }
    err /= static_cast<double>(actuals.size());
    return err / scale;
}

double average_log_score(std::span<const double> log_densities) {
    if (log_densities.empty()) {
        throw ConfigError("average_log_score: empty input");
    }
    double s = 0.0;
    for (double v : log_densities) {
        if (!std::isfinite(v)) {
            throw NumericError("average_log_score: non-finite log density");
        }
        s += v;
    }
    return s / static_cast<double>(log_densities.size());
}

DmResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b,
                 std::size_t horizon) {
    const std::size_t n = loss_a.size();
    if (n != loss_b.size()) {
        throw ConfigError("dm_test: loss sequences must have equal length");
    }
    if (n < 10) {
        throw ConfigError("dm_test: need at least 10 observations");
    }
    if (horizon < 1) {
        throw ConfigError("dm_test: horizon must be >= 1");
    }

    std::vector<double> d(n);
    double dbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = loss_a[i] - loss_b[i];
        dbar += d[i];
    }
    dbar /= static_cast<double>(n);

    const double nn = static_cast<double>(n);
    double gamma0 = 0.0;
    for (double v : d) {
        const double e = v - dbar;
        gamma0 += e * e;
    }
    gamma0 /= nn;

    DmResult out;
    if (gamma0 == 0.0) {
        out.degenerate = true;
        return out; // identical losses: statistic 0, p 1
    }

    double variance = gamma0;
    for (std::size_t k = 1; k < horizon && k < n; ++k) {
        double gk = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            gk += (d[t] - dbar) * (d[t - k] - dbar);
        }
        variance += 2.0 * gk / nn;
    }
    if (variance <= 0.0) {
        variance = gamma0;
        out.degenerate = true;
    }

    const double h = static_cast<double>(horizon);
    const double harvey = std::sqrt((nn + 1.0 - 2.0 * h + h * (h - 1.0) / nn) / nn);
    out.statistic = harvey * dbar / std::sqrt(variance / nn);

    const boost::math::students_t dist(nn - 1.0);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.statistic)));
    return out;
}

} // namespace fepool
