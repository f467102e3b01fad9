#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fepool {

/// Objective callback: returns f(x); when grad is non-null it must also be
/// filled with the gradient at x.
using ValueGradFn = std::function<double(std::span<const double> x, double* grad)>;
using ValueFn = std::function<double(std::span<const double> x)>;

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6; // max-norm of the gradient
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Dense BFGS minimizer with Armijo backtracking line search. The objective
/// value at the returned point never exceeds the value at x0: steps are only
/// taken when they strictly improve. Curvature updates that would break
/// positive definiteness are skipped.
BfgsResult bfgs_minimize(const ValueGradFn& f, std::vector<double> x0, const BfgsOptions& opts = {});

struct NelderMeadOptions {
    int max_iterations = 500;
    double tolerance = 1e-10; // spread of simplex values
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Standard Nelder-Mead simplex minimizer; the initial simplex is x0 plus
/// one vertex per coordinate displaced by `step`. Deterministic.
NelderMeadResult nelder_mead(const ValueFn& f, std::vector<double> x0, double step,
                             const NelderMeadOptions& opts = {});

/// Central finite differences, mainly for checking analytic gradients.
std::vector<double> numeric_gradient(const ValueFn& f, std::span<const double> x, double h = 1e-6);

} // namespace fepool
