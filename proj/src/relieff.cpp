#include "fepool/relieff.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fepool/error.hpp"
#include "fepool/rng.hpp"

namespace fepool {

namespace {

double manhattan(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

struct UniqueInstance {
    std::size_t row;   // representative row in the original matrix
    std::size_t label;
};

} // namespace

std::vector<RankedFeature> relieff_rank(const Matrix& standardized,
                                        const std::vector<std::size_t>& labels,
                                        std::size_t k_neighbors, std::size_t sample_count,
                                        std::uint64_t seed,
                                        const std::vector<std::string>& names,
                                        bool lenient) {
    const std::size_t n_inst = standardized.rows;
    const std::size_t n_feat = standardized.cols;
    if (labels.size() != n_inst) {
        throw ConfigError("relieff: label count mismatch");
    }
    if (names.size() != n_feat) {
        throw ConfigError("relieff: name count mismatch");
    }
    if (k_neighbors < 1) {
        throw ConfigError("relieff: k_neighbors must be >= 1");
    }

    // class priors from the full (multiset) instance list
    std::map<std::size_t, std::size_t> class_count;
    for (std::size_t l : labels) ++class_count[l];
    if (class_count.size() < 2) {
        throw DataError("relieff: need at least 2 distinct labels");
    }

    // distinct (feature row, class) pool for neighbour search
    std::vector<UniqueInstance> pool;
    for (std::size_t r = 0; r < n_inst; ++r) {
        bool dup = false;
        for (const auto& u : pool) {
            if (u.label == labels[r] &&
                std::equal(standardized.row(r).begin(), standardized.row(r).end(),
                           standardized.row(u.row).begin())) {
                dup = true;
                break;
            }
        }
        if (!dup) pool.push_back({r, labels[r]});
    }
    std::map<std::size_t, std::size_t> unique_count;
    for (const auto& u : pool) ++unique_count[u.label];

    std::size_t min_count = n_inst;
    for (const auto& [cls, cnt] : unique_count) min_count = std::min(min_count, cnt);
    if (!lenient && k_neighbors >= min_count) {
        throw ConfigError("relieff: k_neighbors (" + std::to_string(k_neighbors) +
                          ") must be < the smallest class size (" + std::to_string(min_count) + ")");
    }

    // which instances get evaluated
    std::vector<std::size_t> evaluated;
    if (sample_count == kAllInstances || sample_count >= n_inst) {
        evaluated.resize(n_inst);
        for (std::size_t i = 0; i < n_inst; ++i) evaluated[i] = i;
    } else {
        // seeded draw without replacement (partial Fisher-Yates)
        std::vector<std::size_t> idx(n_inst);
        for (std::size_t i = 0; i < n_inst; ++i) idx[i] = i;
        Rng rng(seed);
        for (std::size_t i = 0; i < sample_count; ++i) {
            const std::size_t j = i + rng.uniform_index(n_inst - i);
            std::swap(idx[i], idx[j]);
        }
        evaluated.assign(idx.begin(), idx.begin() + static_cast<long>(sample_count));
        std::sort(evaluated.begin(), evaluated.end());
    }

    const double n_total = static_cast<double>(n_inst);
    std::vector<double> weights(n_feat, 0.0);
    const double norm = 1.0 / static_cast<double>(evaluated.size());

    struct Neighbor {
        double distance;
        std::size_t row;
    };
    std::vector<Neighbor> candidates;

    for (std::size_t r : evaluated) {
        const auto x = standardized.row(r);
        const std::size_t cls = labels[r];
        const double own_prior = static_cast<double>(class_count[cls]) / n_total;

        for (const auto& [other_cls, cnt] : unique_count) {
            candidates.clear();
            for (const auto& u : pool) {
                if (u.label != other_cls) continue;
                const double d = manhattan(x, standardized.row(u.row));
                if (other_cls == cls && d == 0.0) continue; // self / exact duplicates
                candidates.push_back({d, u.row});
            }
            std::sort(candidates.begin(), candidates.end(), [](const Neighbor& a, const Neighbor& b) {
                if (a.distance != b.distance) return a.distance < b.distance;
                return a.row < b.row;
            });
            const std::size_t k = std::min(k_neighbors, candidates.size());
            if (k == 0) continue;

            double scale;
            if (other_cls == cls) {
                scale = -norm / static_cast<double>(k); // nearest hits penalize
            } else {
                const double prior = static_cast<double>(class_count.at(other_cls)) / n_total;
                scale = norm / static_cast<double>(k) * prior / (1.0 - own_prior);
            }
            for (std::size_t i = 0; i < k; ++i) {
                const auto y = standardized.row(candidates[i].row);
                for (std::size_t f = 0; f < n_feat; ++f) {
                    weights[f] += scale * std::abs(x[f] - y[f]);
                }
            }
        }
    }

    std::vector<RankedFeature> ranked(n_feat);
    for (std::size_t f = 0; f < n_feat; ++f) {
        ranked[f] = {f, names[f], weights[f]};
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.index < b.index;
    });
    return ranked;
}

FeatureCatalog select_top_k(const std::vector<RankedFeature>& ranked, std::size_t k) {
    if (k < 1 || k > ranked.size()) {
        throw ConfigError("select_top_k: k (" + std::to_string(k) + ") out of range 1.." +
                          std::to_string(ranked.size()));
    }
    FeatureCatalog catalog;
    catalog.names.reserve(k);
    for (std::size_t i = 0; i < k; ++i) catalog.names.push_back(ranked[i].name);
    return catalog;
}

} // namespace fepool
