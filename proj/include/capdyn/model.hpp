#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace capdyn {

/// Parameter vector of the capability-delegation system.
///
/// alpha   learning rate (per time unit)
/// beta    forgetting rate (per time unit)
/// gamma   adoption sensitivity (per time unit)
/// delta   social pressure strength (per time unit)
/// epsilon residual relearning capacity, in [0, 0.5]
/// k_ai    AI capability relative to the expert human baseline, in [0, 1.2]
/// scope   delegable task fraction s, in (0, 1]
struct ModelParams {
    double alpha = 0.05;
    double beta = 0.03;
    double gamma = 0.5;
    double delta = 0.5;
    double epsilon = 0.01;
    double k_ai = 0.9;
    double scope = 0.7;

    void validate() const;
};

/// A point (H, D) in the unit square: human capability and delegation rate.
struct SystemState {
    double h = 0.0;
    double d = 0.0;

    void validate() const;
};

/// Time-indexed sequence of states produced by an integrator.
struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;

    const SystemState& final_state() const { return states.back(); }
};

enum class Stability { stable_node, unstable_node, saddle, marginal };

enum class FixedPointLabel { fp1, fp2, fp3, interior };

/// Fixed point location with eigenvalues and a stability classification.
/// `regularized_away` marks FP1 when epsilon > 0, where the null state is
/// no longer an exact fixed point and the reported eigenvalues follow the
/// epsilon = 0 convention.
struct FixedPointReport {
    SystemState location;
    std::array<double, 2> eigenvalues{};
    Stability stability = Stability::marginal;
    FixedPointLabel label = FixedPointLabel::fp1;
    bool regularized_away = false;
};

/// State of the two-skill extension: capability, delegation and time share
/// per skill.  tau1 + tau2 == 1 by construction.
struct TwoSkillState {
    double h1 = 0.0, h2 = 0.0;
    double d1 = 0.0, d2 = 0.0;
    double tau1 = 0.5, tau2 = 0.5;
};

const char* stability_name(Stability s);
const char* fixed_point_name(FixedPointLabel l);

} // namespace capdyn
