#pragma once

#include <vector>

#include "capdyn/model.hpp"

namespace capdyn::ode {

/// Time-budget policy for the two-skill extension.
///   no_reallocation    A: time shares fixed at (0.5, 0.5)
///   full_reallocation  B: all time freed by skill-1 delegation goes to
///                         skill 2, tau2 = 0.5 + 0.5 D1
///   both_skills        C: same reallocation rule, used with the same AI
///                         capability applied to both skills
enum class TwoSkillScenario { no_reallocation, full_reallocation, both_skills };

const char* two_skill_scenario_name(TwoSkillScenario s);

struct TwoSkillTrajectory {
    std::vector<double> times;
    std::vector<TwoSkillState> states;
    std::vector<double> aggregate_h; ///< (H1 + H2) / 2 per step

    const TwoSkillState& final_state() const { return states.back(); }
};

/// Integrate the two-skill system: each skill follows the single-skill
/// equations with its learning rate scaled by its time share.  RK4 with
/// per-step clamping, like the single-skill integrator.
TwoSkillTrajectory simulate_two_skill(const ModelParams& skill1,
                                      const ModelParams& skill2,
                                      TwoSkillScenario scenario,
                                      const TwoSkillState& initial,
                                      double t_end, double dt);

} // namespace capdyn::ode
