#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fepool/matrix.hpp"

namespace fepool {

/// Feature coefficients of the weight functions: one row per non-reference
/// pool member (the last member is the reference with an implicit zero row),
/// column 0 is the intercept, columns 1..n follow the feature catalog.
struct CoefficientMatrix {
    std::size_t pool_size = 0;     // m
    std::size_t feature_count = 0; // n

    std::vector<double> values; // (m-1) x (n+1), row-major

    static CoefficientMatrix zeros(std::size_t pool_size, std::size_t feature_count);

    std::size_t rows() const { return pool_size == 0 ? 0 : pool_size - 1; }
    std::size_t cols() const { return feature_count + 1; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
};

/// Binary feature indicators per non-reference pool member. The intercept is
/// always active and not represented.
struct SelectionMatrix {
    std::size_t pool_size = 0;
    std::size_t feature_count = 0;
    std::vector<std::uint8_t> values; // (m-1) x n

    static SelectionMatrix all(std::size_t pool_size, std::size_t feature_count);

    std::size_t rows() const { return pool_size == 0 ? 0 : pool_size - 1; }
    bool selected(std::size_t i, std::size_t j) const { return values[i * feature_count + j] != 0; }
    void set(std::size_t i, std::size_t j, bool on) { values[i * feature_count + j] = on ? 1 : 0; }
    std::size_t active_count(std::size_t i) const;
};

struct PriorConfig {
    double sigma2 = 1000.0; // Gaussian prior variance per coefficient
};

/// Softmax-with-reference weights: eta_i = beta_i0 + sum_j beta_ij * x_j over
/// selected features, w_i = exp(eta_i) / (1 + sum exp(eta)), and the last
/// member gets 1 / (1 + sum exp(eta)). Max-shifted for overflow safety.
/// `features` holds the n standardized feature values (no leading 1).
std::vector<double> combination_weights(std::span<const double> features,
                                        const CoefficientMatrix& beta,
                                        const SelectionMatrix* selection = nullptr);

/// Weight vectors for every feature row, stacked as a (rows x m) matrix.
Matrix weights_matrix(const Matrix& features, const CoefficientMatrix& beta,
                      const SelectionMatrix* selection = nullptr);

/// sum_t log(sum_i w_{t,i} p_{t,i}), evaluated in log space per row.
/// The OpenMP version computes per-row terms in parallel and reduces them in
/// row order, making it bit-identical to pooled_log_score_serial.
double pooled_log_score(const Matrix& log_density, const Matrix& weights);
double pooled_log_score_serial(const Matrix& log_density, const Matrix& weights);

/// Gaussian log prior over active coefficients (intercepts always active)
/// plus, when a selection is given, the integrated Bernoulli-Beta(1,1)
/// indicator mass log[k!(n-k)!/(n+1)!] per row.
double log_prior(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                 const PriorConfig& prior);

/// pooled_log_score with weights derived from (beta, selection) plus log_prior.
double log_posterior(const CoefficientMatrix& beta, const SelectionMatrix* selection,
                     const Matrix& log_density, const Matrix& features,
                     const PriorConfig& prior);

/// Analytic gradient of log_posterior in beta; masked entries are exactly 0.
CoefficientMatrix grad_log_posterior(const CoefficientMatrix& beta,
                                     const SelectionMatrix* selection,
                                     const Matrix& log_density, const Matrix& features,
                                     const PriorConfig& prior);
CoefficientMatrix grad_log_posterior_serial(const CoefficientMatrix& beta,
                                            const SelectionMatrix* selection,
                                            const Matrix& log_density, const Matrix& features,
                                            const PriorConfig& prior);

/// Value and gradient in one pass; this is what the MAP optimizer calls.
struct PosteriorEval {
    double value = 0.0;
    CoefficientMatrix grad;
};
PosteriorEval log_posterior_value_and_grad(const CoefficientMatrix& beta,
                                           const SelectionMatrix* selection,
                                           const Matrix& log_density, const Matrix& features,
                                           const PriorConfig& prior);

} // namespace fepool
