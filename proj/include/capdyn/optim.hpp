#pragma once

#include <functional>
#include <span>
#include <vector>

namespace capdyn::optim {

/// Box-constrained minimization problem.  Dimensions flagged log_scale are
/// searched in log10 space (bounds must be positive there).
struct Problem {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<bool> log_scale; ///< empty means all-linear
    std::function<double(std::span<const double>)> objective;
};

struct Result {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    int evaluations = 0;
};

/// Nelder-Mead with vertices clamped to the box.  `start` is in natural
/// (untransformed) units.
Result nelder_mead(const Problem& problem, std::span<const double> start,
                   int max_iterations = 400, double tolerance = 1e-12);

/// Deterministic multi-start: a fixed Latin-hypercube of `n_starts` points
/// over the box (log-spaced where flagged), each polished with Nelder-Mead.
/// Best objective value wins; exact ties go to the lowest first coordinate.
Result multistart_minimize(const Problem& problem, int n_starts = 16,
                           int max_iterations = 400);

} // namespace capdyn::optim
