#include "capdyn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "capdyn/rng.hpp"

namespace capdyn::optim {

namespace {

struct Transform {
    const Problem& problem;

    bool is_log(std::size_t d) const {
        return d < problem.log_scale.size() && problem.log_scale[d];
    }
    double to_internal(std::size_t d, double x) const {
        return is_log(d) ? std::log10(x) : x;
    }
    double to_natural(std::size_t d, double z) const {
        return is_log(d) ? std::pow(10.0, z) : z;
    }
    double lo_internal(std::size_t d) const { return to_internal(d, problem.lo[d]); }
    double hi_internal(std::size_t d) const { return to_internal(d, problem.hi[d]); }

    std::vector<double> natural(const std::vector<double>& z) const {
        std::vector<double> x(z.size());
        for (std::size_t d = 0; d < z.size(); ++d)
            x[d] = std::clamp(to_natural(d, z[d]), problem.lo[d], problem.hi[d]);
        return x;
    }
};

void validate(const Problem& problem) {
    const std::size_t dim = problem.lo.size();
    if (dim == 0 || problem.hi.size() != dim)
        throw std::invalid_argument("optim: inconsistent bounds");
    for (std::size_t d = 0; d < dim; ++d) {
        if (!(problem.lo[d] < problem.hi[d]))
            throw std::invalid_argument("optim: need lo < hi in every dimension");
        if (d < problem.log_scale.size() && problem.log_scale[d] && problem.lo[d] <= 0.0)
            throw std::invalid_argument("optim: log-scaled dimension needs positive bounds");
    }
}

} // namespace

Result nelder_mead(const Problem& problem, std::span<const double> start,
                   int max_iterations, double tolerance) {
    validate(problem);
    const std::size_t dim = problem.lo.size();
    if (start.size() != dim) throw std::invalid_argument("optim: start size mismatch");

    const Transform tf{problem};
    int evals = 0;
    const auto eval = [&](const std::vector<double>& z) {
        ++evals;
        return problem.objective(tf.natural(z));
    };
    const auto clamp_z = [&](std::vector<double>& z) {
        for (std::size_t d = 0; d < dim; ++d)
            z[d] = std::clamp(z[d], tf.lo_internal(d), tf.hi_internal(d));
    };

    // Initial simplex around the start point, scaled to the box.
    std::vector<std::vector<double>> simplex;
    std::vector<double> z0(dim);
    for (std::size_t d = 0; d < dim; ++d)
        z0[d] = std::clamp(tf.to_internal(d, start[d]), tf.lo_internal(d),
                           tf.hi_internal(d));
    simplex.push_back(z0);
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> z = z0;
        const double span = tf.hi_internal(d) - tf.lo_internal(d);
        z[d] += 0.05 * span;
        clamp_z(z);
        if (z[d] == z0[d]) z[d] = z0[d] - 0.05 * span;
        clamp_z(z);
        simplex.push_back(z);
    }
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

    const double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;
    bool converged = false;
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::vector<std::size_t> order(simplex.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> sorted_simplex;
        std::vector<double> sorted_values;
        for (auto i : order) {
            sorted_simplex.push_back(simplex[i]);
            sorted_values.push_back(values[i]);
        }
        simplex = std::move(sorted_simplex);
        values = std::move(sorted_values);

        if (std::abs(values.back() - values.front()) <=
            tolerance * (1.0 + std::abs(values.front()))) {
            converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
        for (auto& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double coef) {
            std::vector<double> z(dim);
            for (std::size_t d = 0; d < dim; ++d)
                z[d] = centroid[d] + coef * (centroid[d] - simplex.back()[d]);
            clamp_z(z);
            return z;
        };

        const auto reflected = blend(kAlpha);
        const double f_reflected = eval(reflected);
        if (f_reflected < values.front()) {
            const auto expanded = blend(kGamma);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex.back() = expanded;
                values.back() = f_expanded;
            } else {
                simplex.back() = reflected;
                values.back() = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[values.size() - 2]) {
            simplex.back() = reflected;
            values.back() = f_reflected;
            continue;
        }
        const auto contracted = blend(-kRho);
        const double f_contracted = eval(contracted);
        if (f_contracted < values.back()) {
            simplex.back() = contracted;
            values.back() = f_contracted;
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d)
                simplex[i][d] =
                    simplex[0][d] + kSigma * (simplex[i][d] - simplex[0][d]);
            values[i] = eval(simplex[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best]) best = i;

    Result result;
    result.x = tf.natural(simplex[best]);
    result.value = values[best];
    result.converged = converged;
    result.evaluations = evals;
    return result;
}

Result multistart_minimize(const Problem& problem, int n_starts, int max_iterations) {
    validate(problem);
    if (n_starts < 1) throw std::invalid_argument("optim: n_starts must be >= 1");
    const std::size_t dim = problem.lo.size();
    const Transform tf{problem};

    // Fixed Latin hypercube: per-dimension stratum permutation from a seeded
    // stream, identical on every call.
    std::vector<std::vector<int>> strata(dim, std::vector<int>(static_cast<std::size_t>(n_starts)));
    for (std::size_t d = 0; d < dim; ++d) {
        auto& perm = strata[d];
        std::iota(perm.begin(), perm.end(), 0);
        SplitMix64 rng(0xC0FFEEULL + 1315423911ULL * (d + 1));
        for (std::size_t i = perm.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(perm[i - 1], perm[j]);
        }
    }

    Result best;
    bool have_best = false;
    for (int s = 0; s < n_starts; ++s) {
        std::vector<double> start(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double frac =
                (static_cast<double>(strata[d][static_cast<std::size_t>(s)]) + 0.5) /
                static_cast<double>(n_starts);
            const double z =
                tf.lo_internal(d) + frac * (tf.hi_internal(d) - tf.lo_internal(d));
            start[d] = tf.to_natural(d, z);
        }
        Result r = nelder_mead(problem, start, max_iterations);
        const bool better =
            !have_best || r.value < best.value ||
            (r.value == best.value && r.x[0] < best.x[0]);
        if (better) {
            best = std::move(r);
            have_best = true;
        }
    }
    // One restart from the winning point guards against premature simplex
    // collapse.
    Result polished = nelder_mead(problem, best.x, max_iterations);
    if (polished.value < best.value ||
        (polished.value == best.value && polished.x[0] < best.x[0]))
        best = std::move(polished);
    return best;
}

} // namespace capdyn::optim
