#include "capdyn/two_skill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capdyn::ode {

namespace {

struct Vec4 {
    double h1, d1, h2, d2;
};

double skill_dh(const ModelParams& p, double tau, double h, double d) {
    const double d_eff = p.scope * d;
    return p.alpha * tau * (h + p.epsilon) * (1.0 - h) * (1.0 - d_eff) -
           p.beta * h * d_eff;
}

double skill_dd(const ModelParams& p, double h, double d) {
    return p.gamma * (p.k_ai - h) * (1.0 - d) * d + p.delta * d * (1.0 - d) * d;
}

double tau2_of(TwoSkillScenario scenario, double d1) {
    if (scenario == TwoSkillScenario::no_reallocation) return 0.5;
    return 0.5 + 0.5 * std::clamp(d1, 0.0, 1.0);
}

} // namespace

const char* two_skill_scenario_name(TwoSkillScenario s) {
    switch (s) {
        case TwoSkillScenario::no_reallocation: return "A";
        case TwoSkillScenario::full_reallocation: return "B";
        case TwoSkillScenario::both_skills: return "C";
    }
    return "?";
}

TwoSkillTrajectory simulate_two_skill(const ModelParams& skill1,
                                      const ModelParams& skill2,
                                      TwoSkillScenario scenario,
                                      const TwoSkillState& initial,
                                      double t_end, double dt) {
    skill1.validate();
    skill2.validate();
    if (!(dt > 0.0) || t_end < dt)
        throw std::invalid_argument("simulate_two_skill: need dt > 0 and t_end >= dt");

    const auto deriv = [&](const Vec4& v) -> Vec4 {
        const double tau2 = tau2_of(scenario, v.d1);
        const double tau1 = 1.0 - tau2;
        return {skill_dh(skill1, tau1, v.h1, v.d1), skill_dd(skill1, v.h1, v.d1),
                skill_dh(skill2, tau2, v.h2, v.d2), skill_dd(skill2, v.h2, v.d2)};
    };
    const auto axpy = [](const Vec4& v, double a, const Vec4& k) -> Vec4 {
        return {v.h1 + a * k.h1, v.d1 + a * k.d1, v.h2 + a * k.h2, v.d2 + a * k.d2};
    };

    const auto n_steps = static_cast<std::size_t>(t_end / dt);
    TwoSkillTrajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.aggregate_h.reserve(n_steps + 1);

    Vec4 v{initial.h1, initial.d1, initial.h2, initial.d2};
    const auto record = [&](double t) {
        TwoSkillState st;
        st.h1 = v.h1;
        st.d1 = v.d1;
        st.h2 = v.h2;
        st.d2 = v.d2;
        st.tau2 = tau2_of(scenario, v.d1);
        st.tau1 = 1.0 - st.tau2;
        traj.times.push_back(t);
        traj.states.push_back(st);
        traj.aggregate_h.push_back(0.5 * (v.h1 + v.h2));
    };
    record(0.0);

    for (std::size_t step = 0; step < n_steps; ++step) {
        const Vec4 k1 = deriv(v);
        const Vec4 k2 = deriv(axpy(v, 0.5 * dt, k1));
        const Vec4 k3 = deriv(axpy(v, 0.5 * dt, k2));
        const Vec4 k4 = deriv(axpy(v, dt, k3));
        v.h1 += dt / 6.0 * (k1.h1 + 2.0 * k2.h1 + 2.0 * k3.h1 + k4.h1);
        v.d1 += dt / 6.0 * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1);
        v.h2 += dt / 6.0 * (k1.h2 + 2.0 * k2.h2 + 2.0 * k3.h2 + k4.h2);
        v.d2 += dt / 6.0 * (k1.d2 + 2.0 * k2.d2 + 2.0 * k3.d2 + k4.d2);
        if (!std::isfinite(v.h1) || !std::isfinite(v.d1) || !std::isfinite(v.h2) ||
            !std::isfinite(v.d2))
            throw std::runtime_error("simulate_two_skill: non-finite state at step " +
                                     std::to_string(step + 1));
        v.h1 = std::clamp(v.h1, 0.0, 1.0);
        v.d1 = std::clamp(v.d1, 0.0, 1.0);
        v.h2 = std::clamp(v.h2, 0.0, 1.0);
        v.d2 = std::clamp(v.d2, 0.0, 1.0);
        record(static_cast<double>(step + 1) * dt);
    }
    return traj;
}

} // namespace capdyn::ode
