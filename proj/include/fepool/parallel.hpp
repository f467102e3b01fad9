#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fepool {

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must be independent; results must
/// be written to disjoint slots so the outcome is identical to the serial
/// loop regardless of thread count. Dynamic scheduling because per-iteration
/// cost is uneven (model fits range from trivial to GARCH likelihoods).
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
#endif
}

/// Same contract with static scheduling, for uniform-cost iterations where
/// the dynamic scheduler's bookkeeping would dominate (per-row score and
/// gradient terms).
template <typename Body>
void parallel_for_static(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
#endif
}

} // namespace fepool
