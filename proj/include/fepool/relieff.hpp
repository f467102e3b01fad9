#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fepool/features.hpp"
#include "fepool/matrix.hpp"

namespace fepool {

/// Sentinel: evaluate every instance rather than a random subset.
inline constexpr std::size_t kAllInstances = 0;

struct RankedFeature {
    std::size_t index = 0; // column in the input matrix
    std::string name;
    double weight = 0.0;
};

/// Multi-class ReliefF on standardized features: each evaluated instance
/// penalizes distances to its k nearest same-class neighbours and rewards
/// prior-weighted distances to the k nearest neighbours of every other
/// class. Distances are Manhattan; neighbour search runs over distinct
/// (feature row, class) pairs so duplicated instance sets rank identically.
/// Sorted by weight descending (ties by column order). Deterministic for a
/// given seed when sample_count != kAllInstances.
///
/// `lenient` relaxes the k-vs-class-size precondition by clamping k and
/// skipping the hit term for singleton classes; the strict form throws.
std::vector<RankedFeature> relieff_rank(const Matrix& standardized,
                                        const std::vector<std::size_t>& labels,
                                        std::size_t k_neighbors, std::size_t sample_count,
                                        std::uint64_t seed,
                                        const std::vector<std::string>& names,
                                        bool lenient = false);

/// First k names of the ranking, in rank order. Throws ConfigError when k is
/// 0 or exceeds the ranking length.
FeatureCatalog select_top_k(const std::vector<RankedFeature>& ranked, std::size_t k);

} // namespace fepool
