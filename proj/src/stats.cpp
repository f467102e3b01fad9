#include "fepool/stats.hpp"

#include <algorithm>
#include <cmath>

#include "fepool/error.hpp"

namespace fepool {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) {
        const double d = v - mu;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<double> diff(std::span<const double> x) {
    std::vector<double> d;
    if (x.size() < 2) return d;
    d.reserve(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
    return d;
}

double autocovariance(std::span<const double> x, std::size_t lag) {
    const std::size_t n = x.size();
    if (n == 0 || lag >= n) return 0.0;
    const double mu = mean(x);
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
        s += (x[t] - mu) * (x[t + lag] - mu);
    }
    return s / static_cast<double>(n);
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
    std::vector<double> r(max_lag, 0.0);
    const double c0 = autocovariance(x, 0);
    if (c0 <= 0.0) return r;
    for (std::size_t h = 1; h <= max_lag; ++h) {
        r[h - 1] = autocovariance(x, h) / c0;
    }
    return r;
}

std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
    const std::vector<double> rho = acf(x, max_lag);
    std::vector<double> out(max_lag, 0.0);
    if (max_lag == 0) return out;

    // Durbin-Levinson recursion; phi holds the AR coefficients of order k.
    std::vector<double> phi(max_lag, 0.0), prev(max_lag, 0.0);
    double v = 1.0; // innovation variance ratio
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = rho[k - 1];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j - 1] * rho[k - 1 - j];
        if (v <= 1e-14) {
            // degenerate (perfectly predictable); remaining pacf set to 0
            break;
        }
        double a = num / v;
        a = std::clamp(a, -1.0, 1.0);
        phi[k - 1] = a;
        for (std::size_t j = 1; j < k; ++j) {
            phi[j - 1] = prev[j - 1] - a * prev[k - 1 - j];
        }
        v *= (1.0 - a * a);
        out[k - 1] = a;
        std::copy(phi.begin(), phi.begin() + static_cast<long>(k), prev.begin());
    }
    return out;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) {
        throw NumericError("solve_linear: shape mismatch");
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a.at(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) {
            throw NumericError("solve_linear: singular system");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a.at(col, c), a.at(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        const double d = a.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a.at(i, c) * x[c];
        x[i] = s / a.at(i, i);
    }
    return x;
}

std::vector<double> ols_solve(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows;
    const std::size_t p = x.cols;
    if (y.size() != n) {
        throw NumericError("ols_solve: row count mismatch");
    }
    Matrix xtx(p, p);
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += x.at(r, i) * x.at(r, j);
            xtx.at(i, j) = s;
            xtx.at(j, i) = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += x.at(r, i) * y[r];
        xty[i] = s;
    }
    // tiny ridge keeps short-window, collinear designs solvable
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::abs(xtx.at(i, i)));
    const double ridge = std::max(scale, 1.0) * 1e-10;
    for (std::size_t i = 0; i < p; ++i) xtx.at(i, i) += ridge;
    return solve_linear(std::move(xtx), std::move(xty));
}

double r_squared(std::span<const double> y, std::span<const double> fitted) {
    const std::size_t n = y.size();
    if (n == 0 || fitted.size() != n) return 0.0;
    const double mu = mean(y);
    double tss = 0.0, rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = y[i] - mu;
        const double e = y[i] - fitted[i];
        tss += dy * dy;
        rss += e * e;
    }
    if (tss <= 0.0) return 0.0;
    return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

} // namespace fepool
