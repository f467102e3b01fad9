#include "fepool/pool.hpp"

#include <algorithm>
#include <cmath>

#include "fepool/error.hpp"
#include "fepool/parallel.hpp"

namespace fepool {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void check_shapes(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                  std::size_t feature_count) {
    if (beta.feature_count != feature_count) {
        throw ConfigError("coefficient matrix expects " + std::to_string(beta.feature_count) +
                          " features, got " + std::to_string(feature_count));
    }
    if (selection != nullptr) {
        if (selection->pool_size != beta.pool_size ||
            selection->feature_count != beta.feature_count) {
            throw ConfigError("selection matrix shape does not match coefficients");
        }
    }
}

/// Row score term and weights in one place so the gradient reuses them.
struct RowEval {
    std::vector<double> weights;
    double log_score = 0.0;
};

RowEval eval_row(std::span<const double> features, std::span<const double> log_dens,
                 const CoefficientMatrix& beta, const SelectionMatrix* selection) {
    RowEval out;
    out.weights = combination_weights(features, beta, selection);
    // log-sum-exp of log w_i + log p_i
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(out.weights.size());
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        terms[i] = std::log(out.weights[i]) + log_dens[i];
        best = std::max(best, terms[i]);
    }
    if (!std::isfinite(best)) {
        throw NumericError("NonFiniteScore: mixture density underflowed to zero");
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    out.log_score = best + std::log(s);
    return out;
}

} // namespace

CoefficientMatrix CoefficientMatrix::zeros(std::size_t pool_size, std::size_t feature_count) {
    CoefficientMatrix m;
    m.pool_size = pool_size;
    m.feature_count = feature_count;
    m.values.assign(pool_size == 0 ? 0 : (pool_size - 1) * (feature_count + 1), 0.0);
    return m;
}

SelectionMatrix SelectionMatrix::all(std::size_t pool_size, std::size_t feature_count) {
    SelectionMatrix s;
    s.pool_size = pool_size;
    s.feature_count = feature_count;
    s.values.assign(pool_size == 0 ? 0 : (pool_size - 1) * feature_count, 1);
    return s;
}

std::size_t SelectionMatrix::active_count(std::size_t i) const {
    std::size_t k = 0;
    for (std::size_t j = 0; j < feature_count; ++j) {
        if (selected(i, j)) ++k;
    }
    return k;
}

std::vector<double> combination_weights(std::span<const double> features,
                                        const CoefficientMatrix& beta,
                                        const SelectionMatrix* selection) {
    check_shapes(beta, selection, features.size());
    const std::size_t m = beta.pool_size;
    std::vector<double> eta(beta.rows());
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        double v = beta.at(i, 0); // intercept, always active
        for (std::size_t j = 0; j < beta.feature_count; ++j) {
            if (selection == nullptr || selection->selected(i, j)) {
                v += beta.at(i, j + 1) * features[j];
            }
        }
        eta[i] = v;
    }
    // reference member has eta = 0; shift by the max for overflow safety
    double shift = 0.0;
    for (double e : eta) shift = std::max(shift, e);
    double denom = std::exp(-shift);
    std::vector<double> w(m);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        w[i] = std::exp(eta[i] - shift);
        denom += w[i];
    }
    for (std::size_t i = 0; i < eta.size(); ++i) w[i] /= denom;
    w[m - 1] = std::exp(-shift) / denom;
    return w;
}

Matrix weights_matrix(const Matrix& features, const CoefficientMatrix& beta,
                      const SelectionMatrix* selection) {
    Matrix w(features.rows, beta.pool_size);
    for (std::size_t r = 0; r < features.rows; ++r) {
        const std::vector<double> row = combination_weights(features.row(r), beta, selection);
        std::copy(row.begin(), row.end(), w.row(r).begin());
    }
    return w;
}

double pooled_log_score_serial(const Matrix& log_density, const Matrix& weights) {
    if (log_density.rows != weights.rows || log_density.cols != weights.cols) {
        throw ConfigError("pooled_log_score: shape mismatch");
    }
    double total = 0.0;
    std::vector<double> terms(log_density.cols);
    for (std::size_t r = 0; r < log_density.rows; ++r) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < log_density.cols; ++i) {
            terms[i] = std::log(weights.at(r, i)) + log_density.at(r, i);
            best = std::max(best, terms[i]);
        }
        if (!std::isfinite(best)) {
            throw NumericError("NonFiniteScore: mixture density underflowed to zero at row " +
                               std::to_string(r));
        }
        double s = 0.0;
        for (double t : terms) s += std::exp(t - best);
        total += best + std::log(s);
    }
    return total;
}

namespace {

/// Below this row count the parallel-region overhead outweighs the per-row
/// work, so the kernels fall through to the serial loop (identical output).
constexpr std::size_t kParallelRowThreshold = 2048;

} // namespace

double pooled_log_score(const Matrix& log_density, const Matrix& weights) {
    if (log_density.rows < kParallelRowThreshold) {
        return pooled_log_score_serial(log_density, weights);
    }
    if (log_density.rows != weights.rows || log_density.cols != weights.cols) {
        throw ConfigError("pooled_log_score: shape mismatch");
    }
    std::vector<double> row_scores(log_density.rows, 0.0);
    std::vector<std::uint8_t> bad(log_density.rows, 0);
    parallel_for_static(log_density.rows, [&](std::size_t r) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(log_density.cols);
        for (std::size_t i = 0; i < log_density.cols; ++i) {
            terms[i] = std::log(weights.at(r, i)) + log_density.at(r, i);
            best = std::max(best, terms[i]);
        }
        if (!std::isfinite(best)) {
            bad[r] = 1;
            return;
        }
        double s = 0.0;
        for (double t : terms) s += std::exp(t - best);
        row_scores[r] = best + std::log(s);
    });
    double total = 0.0;
    for (std::size_t r = 0; r < log_density.rows; ++r) {
        if (bad[r]) {
            throw NumericError("NonFiniteScore: mixture density underflowed to zero at row " +
                               std::to_string(r));
        }
        total += row_scores[r];
    }
    return total;
}

double log_prior(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                 const PriorConfig& prior) {
    if (prior.sigma2 <= 0.0) {
        throw ConfigError("prior sigma2 must be positive");
    }
    const double log_norm = -0.5 * (kLogTwoPi + std::log(prior.sigma2));
    const double inv2s = 0.5 / prior.sigma2;
    double lp = 0.0;
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        const double b0 = beta.at(i, 0);
        lp += log_norm - b0 * b0 * inv2s;
        for (std::size_t j = 0; j < beta.feature_count; ++j) {
            if (selection == nullptr || selection->selected(i, j)) {
                const double b = beta.at(i, j + 1);
                lp += log_norm - b * b * inv2s;
            }
        }
    }
    if (selection != nullptr) {
        // Beta(1,1) hyperprior on the Bernoulli rate integrated out:
        // P(k active of n) = k!(n-k)!/(n+1)!
        const double n = static_cast<double>(selection->feature_count);
        for (std::size_t i = 0; i < selection->rows(); ++i) {
            const double k = static_cast<double>(selection->active_count(i));
            lp += std::lgamma(k + 1.0) + std::lgamma(n - k + 1.0) - std::lgamma(n + 2.0);
        }
    }
    return lp;
}

double log_posterior(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                     const Matrix& log_density, const Matrix& features,
                     const PriorConfig& prior) {
    check_shapes(beta, selection, features.cols);
    if (log_density.rows != features.rows) {
        throw ConfigError("log_posterior: density and feature rows mismatch");
    }
    if (log_density.cols != beta.pool_size) {
        throw ConfigError("log_posterior: density columns must equal pool size");
    }
    const Matrix w = weights_matrix(features, beta, selection);
    return pooled_log_score(log_density, w) + log_prior(beta, selection, prior);
}

namespace {

/// Per-row gradient contribution of the score part, written into `out`
/// (length (m-1)*(n+1)): d/d beta_ij = x_j * (w_i p_i / q - w_i).
void score_grad_row(std::span<const double> features, std::span<const double> log_dens,
                    const CoefficientMatrix& beta, const SelectionMatrix* selection,
                    const RowEval& row, std::span<double> out) {
    const std::size_t cols = beta.cols();
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        const double wi = row.weights[i];
        const double ratio = std::exp(std::log(wi) + log_dens[i] - row.log_score);
        const double common = ratio - wi;
        out[i * cols + 0] = common;
        for (std::size_t j = 0; j < beta.feature_count; ++j) {
            const bool active = selection == nullptr || selection->selected(i, j);
            out[i * cols + j + 1] = active ? common * features[j] : 0.0;
        }
    }
}

void add_prior_grad(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                    const PriorConfig& prior, CoefficientMatrix& grad) {
    const double inv_s2 = 1.0 / prior.sigma2;
    for (std::size_t i = 0; i < beta.rows(); ++i) {
        grad.at(i, 0) -= beta.at(i, 0) * inv_s2;
        for (std::size_t j = 0; j < beta.feature_count; ++j) {
            if (selection == nullptr || selection->selected(i, j)) {
                grad.at(i, j + 1) -= beta.at(i, j + 1) * inv_s2;
            }
        }
    }
}

} // namespace

CoefficientMatrix grad_log_posterior_serial(const CoefficientMatrix& beta,
                                            const SelectionMatrix* selection,
                                            const Matrix& log_density, const Matrix& features,
                                            const PriorConfig& prior) {
    check_shapes(beta, selection, features.cols);
    CoefficientMatrix grad = CoefficientMatrix::zeros(beta.pool_size, beta.feature_count);
    std::vector<double> contrib(grad.values.size());
    for (std::size_t r = 0; r < log_density.rows; ++r) {
        const RowEval row = eval_row(features.row(r), log_density.row(r), beta, selection);
        score_grad_row(features.row(r), log_density.row(r), beta, selection, row, contrib);
        for (std::size_t k = 0; k < contrib.size(); ++k) grad.values[k] += contrib[k];
    }
    add_prior_grad(beta, selection, prior, grad);
    return grad;
}

CoefficientMatrix grad_log_posterior(const CoefficientMatrix& beta,
                                     const SelectionMatrix* selection,
                                     const Matrix& log_density, const Matrix& features,
                                     const PriorConfig& prior) {
    return log_posterior_value_and_grad(beta, selection, log_density, features, prior).grad;
}

PosteriorEval log_posterior_value_and_grad(const CoefficientMatrix& beta,
                                           const SelectionMatrix* selection,
                                           const Matrix& log_density, const Matrix& features,
                                           const PriorConfig& prior) {
    check_shapes(beta, selection, features.cols);
    if (log_density.rows != features.rows) {
        throw ConfigError("log_posterior: density and feature rows mismatch");
    }
    if (log_density.cols != beta.pool_size) {
        throw ConfigError("log_posterior: density columns must equal pool size");
    }
    const std::size_t rows = log_density.rows;
    const std::size_t dim = beta.values.size();

    // per-row terms computed in parallel, reduced in row order for
    // reproducibility independent of thread count
    std::vector<double> row_scores(rows, 0.0);
    Matrix contrib(rows, dim);
    std::vector<std::uint8_t> bad(rows, 0);
    parallel_for_static(rows, [&](std::size_t r) {
        try {
            const RowEval row = eval_row(features.row(r), log_density.row(r), beta, selection);
            row_scores[r] = row.log_score;
            score_grad_row(features.row(r), log_density.row(r), beta, selection, row,
                           contrib.row(r));
        } catch (const std::exception&) {
            bad[r] = 1;
        }
    });

    PosteriorEval out;
    out.grad = CoefficientMatrix::zeros(beta.pool_size, beta.feature_count);
    double score = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (bad[r]) {
            throw NumericError("NonFiniteScore: mixture density underflowed to zero at row " +
                               std::to_string(r));
        }
        score += row_scores[r];
        const auto c = contrib.row(r);
        for (std::size_t k = 0; k < dim; ++k) out.grad.values[k] += c[k];
    }
    out.value = score + log_prior(beta, selection, prior);
    add_prior_grad(beta, selection, prior, out.grad);
    return out;
}

} // namespace fepool
