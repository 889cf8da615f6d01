#include "capdyn/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capdyn::ode {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// dH/dt with the effective delegation already substituted.
double dh_dt(const ModelParams& p, double h, double d) {
    const double d_eff = p.scope * d;
    return p.alpha * (h + p.epsilon) * (1.0 - h) * (1.0 - d_eff) - p.beta * h * d_eff;
}

double dd_dt(const ModelParams& p, double h, double d, double d_mean) {
    return p.gamma * (p.k_ai - h) * (1.0 - d) * d + p.delta * d * (1.0 - d) * d_mean;
}

/// Exact H-nullcline height including epsilon and scope:
/// D* = A / (s (A + beta H)) with A = alpha (H + eps)(1 - H).
double h_nullcline_exact(const ModelParams& p, double h) {
    const double a = p.alpha * (h + p.epsilon) * (1.0 - h);
    return a / (p.scope * (a + p.beta * h));
}

Stability classify(const std::array<double, 2>& eig) {
    constexpr double kMarginalTol = 1e-9;
    if (std::abs(eig[0]) <= kMarginalTol || std::abs(eig[1]) <= kMarginalTol)
        return Stability::marginal;
    if (eig[0] < 0.0 && eig[1] < 0.0) return Stability::stable_node;
    if (eig[0] > 0.0 && eig[1] > 0.0) return Stability::unstable_node;
    return Stability::saddle;
}

} // namespace

Deriv rhs(const ModelParams& params, const SystemState& state, double d_mean) {
    params.validate();
    state.validate();
    if (!std::isfinite(d_mean) || d_mean < 0.0 || d_mean > 1.0)
        throw std::invalid_argument("rhs: d_mean out of range [0, 1]");
    return {dh_dt(params, state.h, state.d), dd_dt(params, state.h, state.d, d_mean)};
}

Trajectory integrate(const ModelParams& params, const SystemState& initial,
                     double t_end, double dt) {
    params.validate();
    initial.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (t_end < dt) throw std::invalid_argument("integrate: t_end must be >= dt");

    const auto n_steps = static_cast<std::size_t>(t_end / dt);
    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(initial);

    double h = initial.h;
    double d = initial.d;
    for (std::size_t step = 0; step < n_steps; ++step) {
        // Mean-field: every stage uses its own d as the population mean.
        const double k1h = dh_dt(params, h, d);
        const double k1d = dd_dt(params, h, d, d);
        const double h2 = h + 0.5 * dt * k1h, d2 = d + 0.5 * dt * k1d;
        const double k2h = dh_dt(params, h2, d2);
        const double k2d = dd_dt(params, h2, d2, d2);
        const double h3 = h + 0.5 * dt * k2h, d3 = d + 0.5 * dt * k2d;
        const double k3h = dh_dt(params, h3, d3);
        const double k3d = dd_dt(params, h3, d3, d3);
        const double h4 = h + dt * k3h, d4 = d + dt * k3d;
        const double k4h = dh_dt(params, h4, d4);
        const double k4d = dd_dt(params, h4, d4, d4);

        h += dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
        d += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if (!std::isfinite(h) || !std::isfinite(d))
            throw std::runtime_error("integrate: non-finite state at step " +
                                     std::to_string(step + 1));
        h = clamp01(h);
        d = clamp01(d);
        traj.times.push_back(static_cast<double>(step + 1) * dt);
        traj.states.push_back({h, d});
    }
    return traj;
}

std::array<std::array<double, 2>, 2> jacobian(const ModelParams& params,
                                              const SystemState& state) {
    params.validate();
    state.validate();
    const double h = state.h, d = state.d;
    const double s = params.scope;
    const double d_eff = s * d;
    std::array<std::array<double, 2>, 2> j{};
    j[0][0] = params.alpha * (1.0 - 2.0 * h - params.epsilon) * (1.0 - d_eff) -
              params.beta * d_eff;
    j[0][1] = s * (-params.alpha * (h + params.epsilon) * (1.0 - h) - params.beta * h);
    j[1][0] = -params.gamma * d * (1.0 - d);
    j[1][1] = (1.0 - 2.0 * d) * (params.gamma * (params.k_ai - h) + params.delta * d) +
              params.delta * d * (1.0 - d);
    return j;
}

std::array<double, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& m) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0)
        throw std::runtime_error("eigenvalues_2x2: complex spectrum");
    const double root = std::sqrt(disc);
    return {0.5 * (tr - root), 0.5 * (tr + root)};
}

std::array<FixedPointReport, 3> boundary_fixed_points(const ModelParams& params) {
    params.validate();
    const double a = params.alpha, b = params.beta, g = params.gamma,
                 dl = params.delta, e = params.epsilon, k = params.k_ai,
                 s = params.scope;

    FixedPointReport fp1;
    fp1.location = {0.0, 0.0};
    fp1.eigenvalues = {a, g * k};
    fp1.label = FixedPointLabel::fp1;
    fp1.regularized_away = e > 0.0;
    fp1.stability = classify(fp1.eigenvalues);

    FixedPointReport fp2;
    fp2.location = {1.0, 0.0};
    fp2.eigenvalues = {-a * (1.0 + e), g * (k - 1.0)};
    fp2.label = FixedPointLabel::fp2;
    fp2.stability = classify(fp2.eigenvalues);

    FixedPointReport fp3;
    fp3.location = {0.0, 1.0};
    // J11 at (0, 1) with partial scope; collapses to -beta at s = 1.
    fp3.eigenvalues = {a * (1.0 - e) * (1.0 - s) - b * s, -(g * k + dl)};
    fp3.label = FixedPointLabel::fp3;
    fp3.stability = classify(fp3.eigenvalues);

    return {fp1, fp2, fp3};
}

Nullclines nullclines(const ModelParams& params, std::span<const double> h_grid) {
    params.validate();
    Nullclines out;
    out.h_grid.assign(h_grid.begin(), h_grid.end());
    out.h_nullcline.reserve(h_grid.size());
    out.d_nullcline.reserve(h_grid.size());
    for (double h : h_grid) {
        if (h < 0.0 || h > 1.0)
            throw std::invalid_argument("nullclines: h_grid point outside [0, 1]");
        const double num = params.alpha * (1.0 - h);
        out.h_nullcline.push_back(num / (num + params.beta));
        if (params.delta <= 0.0) {
            out.d_nullcline.push_back(std::nullopt);
            continue;
        }
        const double dn = params.gamma * (h - params.k_ai) / params.delta;
        if (dn < 0.0)
            out.d_nullcline.push_back(std::nullopt);
        else
            out.d_nullcline.push_back(dn);
    }
    return out;
}

std::optional<FixedPointReport> interior_saddle(const ModelParams& params) {
    params.validate();
    const double k = params.k_ai;
    if (k >= 1.0) return std::nullopt;

    const auto make_report = [&](double h, double d) -> std::optional<FixedPointReport> {
        if (!(h > 0.0 && h < 1.0 && d > 0.0 && d < 1.0)) return std::nullopt;
        FixedPointReport rep;
        rep.location = {h, d};
        rep.eigenvalues = eigenvalues_2x2(jacobian(params, rep.location));
        rep.label = FixedPointLabel::interior;
        rep.stability = classify(rep.eigenvalues);
        return rep;
    };

    if (params.delta <= 0.0) {
        // Degenerate D-nullcline H = K: the crossing sits on that line.
        return make_report(k, h_nullcline_exact(params, k));
    }

    // At most one crossing of the two nullclines exists on (K, 1).
    const auto residual = [&](double h) {
        return h_nullcline_exact(params, h) -
               params.gamma * (h - k) / params.delta;
    };
    double lo = std::max(k, 0.0) + 1e-6;
    double hi = 1.0 - 1e-6;
    if (lo >= hi) return std::nullopt;
    double f_lo = residual(lo), f_hi = residual(hi);
    if (f_lo == 0.0) return make_report(lo, h_nullcline_exact(params, lo));
    if (f_hi == 0.0) return make_report(hi, h_nullcline_exact(params, hi));
    if (f_lo * f_hi > 0.0) return std::nullopt;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if (f_lo * f_mid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    const double h = 0.5 * (lo + hi);
    return make_report(h, h_nullcline_exact(params, h));
}

const char* basin_name(BasinLabel label) {
    switch (label) {
        case BasinLabel::autonomous: return "autonomous";
        case BasinLabel::dependent: return "dependent";
        case BasinLabel::undecided: return "undecided";
    }
    return "?";
}

BasinLabel classify_basin(const ModelParams& params, const SystemState& initial) {
    const SystemState final_state =
        integrate(params, initial, 2000.0, 0.1).final_state();
    if (final_state.h > 0.9 && final_state.d < 0.1) return BasinLabel::autonomous;
    if (final_state.h < 0.1 && final_state.d > 0.9) return BasinLabel::dependent;
    return BasinLabel::undecided;
}

std::vector<double> equilibrium_vs_k(const ModelParams& params,
                                     std::span<const double> k_grid,
                                     const SystemState& initial) {
    std::vector<double> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        ModelParams p = params;
        p.k_ai = k;
        out.push_back(integrate(p, initial, 2000.0, 0.1).final_state().h);
    }
    return out;
}

RecoveryResult recovery_time(const ModelParams& params, double h_start,
                             double h_target, double d_fixed) {
    params.validate();
    if (!(h_start >= 0.0 && h_start <= h_target && h_target <= 1.0))
        throw std::invalid_argument("recovery_time: need 0 <= h_start <= h_target <= 1");
    if (!(d_fixed >= 0.0 && d_fixed < 1.0))
        throw std::invalid_argument("recovery_time: d_fixed out of range [0, 1)");
    if (h_start == h_target) return {RecoveryStatus::reached, 0.0};

    const auto f = [&](double h) {
        return params.alpha * (h + params.epsilon) * (1.0 - h) * (1.0 - d_fixed) -
               params.beta * h * d_fixed;
    };

    constexpr double kHorizon = 1e5;
    constexpr double dt = 0.01;
    double h = h_start;
    double t = 0.0;
    while (t < kHorizon) {
        if (f(h) <= 0.0) return {RecoveryStatus::unreachable, t};
        const double k1 = f(h);
        const double k2 = f(h + 0.5 * dt * k1);
        const double k3 = f(h + 0.5 * dt * k2);
        const double k4 = f(h + dt * k3);
        const double h_next = h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (h_next >= h_target) {
            // Linear interpolation inside the crossing step.
            const double frac = (h_target - h) / (h_next - h);
            return {RecoveryStatus::reached, t + frac * dt};
        }
        h = h_next;
        t += dt;
    }
    return {RecoveryStatus::exceeds_horizon, kHorizon};
}

} // namespace capdyn::ode
