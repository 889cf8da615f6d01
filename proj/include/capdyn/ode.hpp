#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "capdyn/model.hpp"

namespace capdyn::ode {

/// Time derivatives (dH/dt, dD/dt) at a point.
struct Deriv {
    double dh = 0.0;
    double dd = 0.0;
};

/// Right-hand side of the coupled system.
///
/// Capability:  dH/dt = alpha (H + eps) (1 - H) (1 - D_eff) - beta H D_eff
/// Delegation:  dD/dt = gamma (K - H) (1 - D) D + delta D (1 - D) d_mean
///
/// Only the fraction `scope` of tasks is delegable, so the capability
/// equation sees the effective delegation D_eff = scope * D while the
/// delegation equation evolves raw D.  Mean-field callers pass
/// d_mean = state.d.  Derivatives are returned unclamped.
Deriv rhs(const ModelParams& params, const SystemState& state, double d_mean);

/// Fixed-step classical RK4 integration with mean-field delegation
/// (d_mean = d at every stage).  States are clamped to the unit square after
/// each full step, not within stages.  The trajectory holds
/// floor(t_end / dt) + 1 points including the initial state.
Trajectory integrate(const ModelParams& params, const SystemState& initial,
                     double t_end, double dt);

/// Analytic Jacobian of the mean-field system at a point.  Row-major:
/// [0][0] = d(dH)/dH, [0][1] = d(dH)/dD, [1][0] = d(dD)/dH, [1][1] = d(dD)/dD.
/// Reduces to the textbook expressions when scope = 1.
std::array<std::array<double, 2>, 2> jacobian(const ModelParams& params,
                                              const SystemState& state);

/// Eigenvalues of a real 2x2 matrix with real spectrum (trace/determinant
/// formula); throws if the discriminant is negative.
std::array<double, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& m);

/// The three boundary fixed points FP1 = (0,0), FP2 = (1,0), FP3 = (0,1)
/// with closed-form eigenvalues:
///   FP1: (alpha, gamma K)            [epsilon = 0 convention; the report is
///                                     flagged regularized_away when eps > 0]
///   FP2: (-alpha (1 + eps), gamma (K - 1))
///   FP3: (alpha (1 - eps)(1 - s) - beta s, -(gamma K + delta))
///        which is (-beta, -(gamma K + delta)) at full scope.
std::array<FixedPointReport, 3> boundary_fixed_points(const ModelParams& params);

/// Nullcline heights D*(H).  The H-nullcline is the epsilon = 0, full-scope
/// curve alpha (1 - H) / (alpha (1 - H) + beta); the D-nullcline is
/// gamma (H - K) / delta, reported as absent where negative (or when
/// delta = 0, where it degenerates to the vertical line H = K).
struct Nullclines {
    std::vector<double> h_grid;
    std::vector<std::optional<double>> h_nullcline;
    std::vector<std::optional<double>> d_nullcline;
};
Nullclines nullclines(const ModelParams& params, std::span<const double> h_grid);

/// Interior saddle point: the intersection of the exact H-nullcline (with
/// epsilon and scope) and the D-nullcline, located by bisection on
/// H in (K, 1) to 1e-10.  Absent when K >= 1 or no crossing lies in the open
/// unit square.  Eigenvalues are computed numerically from the Jacobian.
std::optional<FixedPointReport> interior_saddle(const ModelParams& params);

enum class BasinLabel { autonomous, dependent, undecided };

const char* basin_name(BasinLabel label);

/// Long-horizon basin classification: integrate to t = 2000 (dt = 0.1);
/// autonomous if the final state has H > 0.9 and D < 0.1, dependent if
/// H < 0.1 and D > 0.9, undecided otherwise.
BasinLabel classify_basin(const ModelParams& params, const SystemState& initial);

/// Final capability H after a long integration, for each K in the grid.
/// Run once from an autonomous-like and once from a dependent-like initial
/// state to trace the two bifurcation branches.
std::vector<double> equilibrium_vs_k(const ModelParams& params,
                                     std::span<const double> k_grid,
                                     const SystemState& initial);

enum class RecoveryStatus { reached, exceeds_horizon, unreachable };

struct RecoveryResult {
    RecoveryStatus status = RecoveryStatus::reached;
    double time = 0.0; ///< elapsed time when reached, otherwise the horizon
};

/// Time for capability to climb from h_start to h_target under fixed
/// delegation d_fixed, following
/// dH/dt = alpha (H + eps)(1 - H)(1 - d_fixed) - beta H d_fixed.
/// Reports `unreachable` if the derivative is non-positive before the target
/// is reached, `exceeds_horizon` past t = 1e5.
RecoveryResult recovery_time(const ModelParams& params, double h_start,
                             double h_target, double d_fixed);

} // namespace capdyn::ode
