// Benchmark comparing the OpenMP kernels against their serial reference
// implementations: density-matrix construction, feature-matrix construction,
// and posterior value+gradient evaluation.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "fepool/density_matrix.hpp"
#include "fepool/features.hpp"
#include "fepool/forecast.hpp"
#include "fepool/parallel.hpp"
#include "fepool/pool.hpp"
#include "fepool/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

fepool::TimeSeries make_series(std::size_t n, std::uint64_t seed) {
    fepool::Rng rng(seed);
    fepool::TimeSeries s;
    s.id = "bench";
    s.values.reserve(n);
    double sigma2 = 1.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sigma2 = 0.05 + 0.10 * prev * prev + 0.85 * sigma2;
        prev = std::sqrt(sigma2) * rng.gaussian();
        s.values.push_back(prev);
    }
    return s;
}

struct Timing {
    double serial_ms;
    double parallel_ms;
};

void report(const std::string& name, const Timing& t, bool identical) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx   %s\n",
                name.c_str(), t.serial_ms, t.parallel_ms,
                t.serial_ms / t.parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = 400;
    if (argc > 1) n = static_cast<std::size_t>(std::stoul(argv[1]));
    std::printf("series length %zu, threads %d\n", n, fepool::hardware_threads());

    const fepool::TimeSeries series = make_series(n, 17);
    fepool::WindowSpec spec;
    spec.min_length = 60;
    spec.feature_window = 50;
    const std::vector<fepool::ModelKind> kinds = {
        fepool::ModelKind::Naive, fepool::ModelKind::Ar, fepool::ModelKind::Garch11};

    // density matrix
    Timing t{};
    auto t0 = Clock::now();
    const fepool::DensityMatrix dm_serial =
        fepool::build_density_matrix_serial(series, kinds, spec);
    t.serial_ms = ms_since(t0);
    t0 = Clock::now();
    const fepool::DensityMatrix dm = fepool::build_density_matrix(series, kinds, spec);
    t.parallel_ms = ms_since(t0);
    report("density matrix", t, dm.log_density.data == dm_serial.log_density.data);

    // feature matrix
    const fepool::FeatureCatalog catalog = fepool::FeatureCatalog::all();
    t0 = Clock::now();
    const fepool::FeatureMatrix fm_serial =
        fepool::build_feature_matrix_serial(series, spec, catalog);
    t.serial_ms = ms_since(t0);
    t0 = Clock::now();
    const fepool::FeatureMatrix fm = fepool::build_feature_matrix(series, spec, catalog);
    t.parallel_ms = ms_since(t0);
    report("feature matrix", t, fm.values.data == fm_serial.values.data);

    // posterior gradient at a random coefficient point, repeated to smooth timing
    const fepool::Standardized std_feats = fepool::standardize(fm.values);
    fepool::CoefficientMatrix beta =
        fepool::CoefficientMatrix::zeros(kinds.size(), catalog.size());
    fepool::Rng rng(3);
    for (double& v : beta.values) v = 0.2 * rng.gaussian();
    const fepool::PriorConfig prior;

    constexpr int kReps = 50;
    t0 = Clock::now();
    fepool::CoefficientMatrix g_serial;
    for (int r = 0; r < kReps; ++r) {
        g_serial = fepool::grad_log_posterior_serial(beta, nullptr, dm.log_density,
                                                     std_feats.matrix, prior);
    }
    t.serial_ms = ms_since(t0);
    t0 = Clock::now();
    fepool::CoefficientMatrix g;
    for (int r = 0; r < kReps; ++r) {
        g = fepool::grad_log_posterior(beta, nullptr, dm.log_density, std_feats.matrix, prior);
    }
    t.parallel_ms = ms_since(t0);
    report("posterior gradient x50", t, g.values == g_serial.values);

    return 0;
}
