#include "fepool/inference.hpp"

#include <algorithm>
#include <cmath>

#include "fepool/error.hpp"
#include "fepool/optim.hpp"
#include "fepool/rng.hpp"

namespace fepool {

namespace {

/// Mapping between the full coefficient matrix and the flat vector of active
/// coordinates the optimizer sees.
struct ActiveCoords {
    std::vector<std::size_t> offsets; // into CoefficientMatrix::values

    static ActiveCoords build(std::size_t pool_size, std::size_t feature_count,
                              const SelectionMatrix* selection) {
        ActiveCoords a;
        const std::size_t cols = feature_count + 1;
        for (std::size_t i = 0; i + 1 < pool_size; ++i) {
            a.offsets.push_back(i * cols); // intercept
            for (std::size_t j = 0; j < feature_count; ++j) {
                if (selection == nullptr || selection->selected(i, j)) {
                    a.offsets.push_back(i * cols + j + 1);
                }
            }
        }
        return a;
    }

    CoefficientMatrix expand(std::span<const double> x, std::size_t pool_size,
                             std::size_t feature_count) const {
        CoefficientMatrix beta = CoefficientMatrix::zeros(pool_size, feature_count);
        for (std::size_t k = 0; k < offsets.size(); ++k) beta.values[offsets[k]] = x[k];
        return beta;
    }

    std::vector<double> flatten(const CoefficientMatrix& beta) const {
        std::vector<double> x(offsets.size());
        for (std::size_t k = 0; k < offsets.size(); ++k) x[k] = beta.values[offsets[k]];
        return x;
    }
};

} // namespace

MapResult map_estimate(const Matrix& log_density, const Matrix& features,
                       const PriorConfig& prior, const SelectionMatrix* selection,
                       const InferenceConfig& config, const CoefficientMatrix* warm_start) {
    const std::size_t pool_size = log_density.cols;
    const std::size_t feature_count = features.cols;
    const ActiveCoords active = ActiveCoords::build(pool_size, feature_count, selection);

    // minimize the negative log posterior over the active coordinates
    auto objective = [&](std::span<const double> x, double* grad) {
        const CoefficientMatrix beta = active.expand(x, pool_size, feature_count);
        if (grad == nullptr) {
            return -log_posterior(beta, selection, log_density, features, prior);
        }
        const PosteriorEval eval =
            log_posterior_value_and_grad(beta, selection, log_density, features, prior);
        for (std::size_t k = 0; k < active.offsets.size(); ++k) {
            grad[k] = -eval.grad.values[active.offsets[k]];
        }
        return -eval.value;
    };

    BfgsOptions opts;
    opts.max_iterations = config.max_iterations;
    opts.gradient_tolerance = config.gradient_tolerance;

    std::vector<std::vector<double>> starts;
    starts.emplace_back(active.offsets.size(), 0.0);
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int r = 0; r < config.restarts; ++r) {
        std::vector<double> s(active.offsets.size());
        for (auto& v : s) v = 0.1 * rng.gaussian();
        starts.push_back(std::move(s));
    }
    if (warm_start != nullptr) {
        starts.push_back(active.flatten(*warm_start));
    }

    bool have_best = false;
    BfgsResult best;
    int failures = 0;
    for (const auto& s : starts) {
        const BfgsResult r = bfgs_minimize(objective, s, opts);
        if (!std::isfinite(r.value)) {
            ++failures;
            continue;
        }
        if (!have_best || r.value < best.value) {
            best = r;
            have_best = true;
        }
    }
    if (!have_best) {
        throw NumericError("map_estimate: all " + std::to_string(failures) +
                           " starts produced a non-finite objective");
    }

    MapResult out;
    out.beta = active.expand(best.x, pool_size, feature_count);
    out.value = -best.value;
    out.iterations = best.iterations;
    return out;
}

bool metropolis_accept(double current_value, double proposal_value, double uniform_draw) {
    if (!std::isfinite(current_value) || !std::isfinite(proposal_value)) {
        throw NumericError("metropolis_accept: non-finite posterior value");
    }
    const double delta = proposal_value - current_value;
    if (delta >= 0.0) return true;
    return uniform_draw < std::exp(delta);
}

std::vector<PosteriorDraw> gibbs_select(const Matrix& log_density, const Matrix& features,
                                        const PriorConfig& prior, const InferenceConfig& config) {
    const std::size_t pool_size = log_density.cols;
    const std::size_t feature_count = features.cols;
    if (feature_count < 1) {
        throw ConfigError("gibbs_select: needs at least one feature");
    }
    if (config.draws < 1) {
        throw ConfigError("gibbs_select: draws must be >= 1");
    }

    Rng rng(config.seed);
    SelectionMatrix current_sel = SelectionMatrix::all(pool_size, feature_count);
    MapResult current = map_estimate(log_density, features, prior, &current_sel, config);

    std::vector<PosteriorDraw> draws;
    draws.reserve(static_cast<std::size_t>(config.draws));
    const int total_sweeps = config.burn_in + config.draws;
    bool failure_pending = false; // a failed conditional MAP, surfaced on the next kept draw
    for (int sweep = 0; sweep < total_sweeps; ++sweep) {
        for (std::size_t i = 0; i + 1 < pool_size; ++i) {
            const std::size_t j = rng.uniform_index(feature_count);
            SelectionMatrix proposal_sel = current_sel;
            proposal_sel.set(i, j, !proposal_sel.selected(i, j));

            const double u = rng.uniform();
            bool failed = false;
            MapResult proposal;
            try {
                // warm start from the current coefficients; the flip only
                // perturbs one coordinate's availability
                proposal = map_estimate(log_density, features, prior, &proposal_sel, config,
                                        &current.beta);
            } catch (const Error&) {
                failed = true;
                failure_pending = true;
            }
            if (!failed && metropolis_accept(current.value, proposal.value, u)) {
                current_sel = std::move(proposal_sel);
                current = std::move(proposal);
            }
        }
        if (sweep >= config.burn_in) {
            PosteriorDraw d;
            d.selection = current_sel;
            d.beta = current.beta;
            d.log_posterior_value = current.value;
            d.proposal_failed = failure_pending;
            failure_pending = false;
            draws.push_back(std::move(d));
        }
    }
    return draws;
}

Matrix selection_frequencies(const std::vector<PosteriorDraw>& draws) {
    if (draws.empty()) {
        throw ConfigError("selection_frequencies: no draws");
    }
    const SelectionMatrix& first = draws.front().selection;
    Matrix freq(first.rows(), first.feature_count, 0.0);
    for (const auto& d : draws) {
        for (std::size_t i = 0; i < first.rows(); ++i) {
            for (std::size_t j = 0; j < first.feature_count; ++j) {
                freq.at(i, j) += d.selection.selected(i, j) ? 1.0 : 0.0;
            }
        }
    }
    const double n = static_cast<double>(draws.size());
    for (double& v : freq.data) v /= n;
    return freq;
}

} // namespace fepool
