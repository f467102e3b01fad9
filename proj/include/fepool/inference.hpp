#pragma once

#include <cstdint>
#include <vector>

#include "fepool/matrix.hpp"
#include "fepool/pool.hpp"

namespace fepool {

struct InferenceConfig {
    int max_iterations = 500;         // per MAP run
    double gradient_tolerance = 1e-6; // max-norm convergence threshold
    int restarts = 2;                 // extra Gaussian(0, 0.1) starts besides beta = 0
    int draws = 100;                  // L, kept variable-selection draws
    int burn_in = 50;                 // discarded sweeps
    std::uint64_t seed = 0;
};

struct MapResult {
    CoefficientMatrix beta;
    double value = 0.0; // log posterior at beta
    int iterations = 0;
};

/// MAP estimate of the weight-function coefficients by quasi-Newton ascent
/// on log_posterior, restricted to the coordinates a selection activates
/// (intercepts always active). Starts at beta = 0 plus `restarts` seeded
/// Gaussian starts plus an optional warm start; the best local optimum wins,
/// so the returned value is never below log_posterior at beta = 0.
MapResult map_estimate(const Matrix& log_density, const Matrix& features,
                       const PriorConfig& prior, const SelectionMatrix* selection,
                       const InferenceConfig& config,
                       const CoefficientMatrix* warm_start = nullptr);

/// Accept iff uniform_draw < min(1, exp(proposal - current)).
bool metropolis_accept(double current_value, double proposal_value, double uniform_draw);

struct PosteriorDraw {
    SelectionMatrix selection;
    CoefficientMatrix beta;        // conditional MAP given the selection
    double log_posterior_value = 0.0;
    bool proposal_failed = false;  // the sweep's conditional MAP failed; proposal rejected
};

/// Metropolis-within-Gibbs over the selection indicators: each sweep visits
/// every non-reference pool member, proposes flipping one uniformly chosen
/// indicator, re-runs the conditional MAP, and accepts on the joint
/// posterior (including the integrated indicator prior). One draw is kept
/// per sweep after burn-in. Fully reproducible from config.seed.
std::vector<PosteriorDraw> gibbs_select(const Matrix& log_density, const Matrix& features,
                                        const PriorConfig& prior, const InferenceConfig& config);

/// Mean indicator per (pool member, feature) across draws, each in [0, 1].
Matrix selection_frequencies(const std::vector<PosteriorDraw>& draws);

} // namespace fepool
