#include "fepool/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fepool {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

BfgsResult bfgs_minimize(const ValueGradFn& f, std::vector<double> x0, const BfgsOptions& opts) {
    const std::size_t n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);

    std::vector<double> grad(n, 0.0);
    res.value = f(res.x, grad.data());
    if (!std::isfinite(res.value)) {
        res.message = "non-finite objective at start";
        return res;
    }
    if (n == 0) {
        res.converged = true;
        return res;
    }

    // inverse Hessian approximation, identity start
    std::vector<double> hinv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;

    std::vector<double> dir(n), x_new(n), grad_new(n), s(n), y(n), hy(n);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        if (max_abs(grad) < opts.gradient_tolerance) {
            res.converged = true;
            return res;
        }

        // dir = -Hinv * grad
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) d += hinv[i * n + j] * grad[j];
            dir[i] = -d;
        }
        double descent = 0.0;
        for (std::size_t i = 0; i < n; ++i) descent += dir[i] * grad[i];
        if (descent >= 0.0) {
            // stale curvature; reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
            descent = -std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
            std::fill(hinv.begin(), hinv.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;
        }

        // Armijo backtracking
        const double c1 = 1e-4;
        double step = 1.0;
        double value_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * dir[i];
            value_new = f(x_new, nullptr);
            if (std::isfinite(value_new) && value_new <= res.value + c1 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.message = "line search failed";
            return res;
        }

        value_new = f(x_new, grad_new.data());
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = grad_new[i] - grad[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        double ss = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ss += s[i] * s[i];
            yy += y[i] * y[i];
        }
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            // BFGS inverse update: H' = (I - r s y')H(I - r y s') + r s s'
            const double r = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double d = 0.0;
                for (std::size_t j = 0; j < n; ++j) d += hinv[i * n + j] * y[j];
                hy[i] = d;
            }
            const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hinv[i * n + j] += (1.0 + r * yhy) * r * s[i] * s[j] -
                                       r * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }

        res.x = x_new;
        res.value = value_new;
        grad = grad_new;
    }
    res.message = "max iterations reached";
    return res;
}

NelderMeadResult nelder_mead(const ValueFn& f, std::vector<double> x0, double step,
                             const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    const std::size_t m = n + 1;
    std::vector<std::vector<double>> pts(m, x0);
    std::vector<double> vals(m);
    for (std::size_t i = 1; i < m; ++i) pts[i][i - 1] += step;
    for (std::size_t i = 0; i < m; ++i) vals[i] = f(pts[i]);

    NelderMeadResult res;
    std::vector<std::size_t> idx(m);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (vals[a] != vals[b]) return vals[a] < vals[b];
            return a < b; // deterministic tie-break
        });
        const std::size_t best = idx[0], worst = idx[m - 1], second_worst = idx[m - 2];
        if (std::abs(vals[worst] - vals[best]) <= opts.tolerance * (1.0 + std::abs(vals[best]))) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        const double fr = f(xr);
        if (fr < vals[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (pts[worst][j] - centroid[j]);
            const double fc = f(xc);
            if (fc < vals[worst]) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                // shrink toward best
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    }
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

std::vector<double> numeric_gradient(const ValueFn& f, std::span<const double> x, double h) {
    std::vector<double> g(x.size(), 0.0);
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double fp = f(p);
        p[i] = orig - h;
        const double fm = f(p);
        p[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace fepool
