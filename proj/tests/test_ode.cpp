#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capdyn/ode.hpp"
#include "capdyn/two_skill.hpp"

using namespace capdyn;
using namespace capdyn::ode;

namespace {

ModelParams baseline() {
    ModelParams p;
    p.alpha = 0.05;
    p.beta = 0.03;
    p.gamma = 0.5;
    p.delta = 0.5;
    p.epsilon = 0.01;
    p.k_ai = 0.9;
    p.scope = 1.0;
    return p;
}

} // namespace

TEST_CASE("rhs vanishes at the boundary fixed points") {
    ModelParams p = baseline();

    const Deriv at_fp2 = rhs(p, {1.0, 0.0}, 0.0);
    CHECK(at_fp2.dh == 0.0);
    CHECK(at_fp2.dd == 0.0);

    const Deriv at_fp3 = rhs(p, {0.0, 1.0}, 1.0);
    CHECK(at_fp3.dh == 0.0);
    CHECK(at_fp3.dd == 0.0);

    // FP1 with epsilon > 0 retains the residual learning seed alpha * eps.
    const Deriv at_fp1 = rhs(p, {0.0, 0.0}, 0.0);
    CHECK(at_fp1.dh == doctest::Approx(p.alpha * p.epsilon).epsilon(1e-14));
    CHECK(at_fp1.dd == 0.0);

    ModelParams strict = p;
    strict.epsilon = 0.0;
    const Deriv strict_fp1 = rhs(strict, {0.0, 0.0}, 0.0);
    CHECK(strict_fp1.dh == 0.0);
    CHECK(strict_fp1.dd == 0.0);
}

TEST_CASE("rhs reproduces the residual relearning rate at the origin") {
    ModelParams p = baseline();
    const Deriv d = rhs(p, {0.0, 0.0}, 0.0);
    CHECK(d.dh == doctest::Approx(5e-4).epsilon(1e-12));
}

TEST_CASE("rhs applies the scope coupling to the capability equation") {
    ModelParams p = baseline();
    p.scope = 0.7;
    const SystemState state{0.5, 0.6};
    const Deriv d = rhs(p, state, state.d);
    const double d_eff = 0.7 * 0.6;
    const double expected_dh =
        p.alpha * (0.5 + p.epsilon) * 0.5 * (1.0 - d_eff) - p.beta * 0.5 * d_eff;
    const double expected_dd = p.gamma * (p.k_ai - 0.5) * 0.4 * 0.6 +
                               p.delta * 0.6 * 0.4 * 0.6;
    CHECK(d.dh == doctest::Approx(expected_dh).epsilon(1e-14));
    CHECK(d.dd == doctest::Approx(expected_dd).epsilon(1e-14));
}

TEST_CASE("rhs rejects invalid input") {
    ModelParams p = baseline();
    CHECK_THROWS_AS(rhs(p, {1.5, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rhs(p, {0.5, 0.5}, 2.0), std::invalid_argument);
    p.k_ai = 2.0;
    CHECK_THROWS_AS(rhs(p, {0.5, 0.5}, 0.5), std::invalid_argument);
}

TEST_CASE("integrate converges to FP2 from the autonomous basin") {
    ModelParams p = baseline();
    p.k_ai = 0.7;
    const Trajectory coarse = integrate(p, {0.95, 0.02}, 500.0, 0.1);
    const Trajectory fine = integrate(p, {0.95, 0.02}, 500.0, 0.01);
    CHECK(coarse.final_state().h == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(coarse.final_state().d == doctest::Approx(0.0).scale(1).epsilon(1e-3));
    CHECK(std::abs(coarse.final_state().h - fine.final_state().h) < 1e-3);
}

TEST_CASE("integrate converges to FP3 from the dependent basin") {
    for (double k : {0.3, 0.9, 1.1}) {
        ModelParams p = baseline();
        p.k_ai = k;
        const Trajectory traj = integrate(p, {0.05, 0.95}, 500.0, 0.1);
        const Trajectory fine = integrate(p, {0.05, 0.95}, 500.0, 0.01);
        CHECK(traj.final_state().h == doctest::Approx(0.0).scale(1).epsilon(1e-3));
        CHECK(traj.final_state().d == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(std::abs(traj.final_state().h - fine.final_state().h) < 1e-3);
    }
}

TEST_CASE("integrate holds the exact fixed point constant") {
    ModelParams p = baseline();
    const Trajectory traj = integrate(p, {1.0, 0.0}, 50.0, 0.1);
    CHECK(traj.times.size() == 501);
    for (const auto& s : traj.states) {
        CHECK(s.h == 1.0);
        CHECK(s.d == 0.0);
    }
}

TEST_CASE("integrate shows fourth-order step-size convergence") {
    ModelParams p = baseline();
    p.k_ai = 0.7;
    const SystemState initial{0.8, 0.1};
    const auto final_h = [&](double dt) {
        return integrate(p, initial, 20.0, dt).final_state().h;
    };
    const double d1 = std::abs(final_h(0.4) - final_h(0.2));
    const double d2 = std::abs(final_h(0.2) - final_h(0.1));
    CHECK(d2 < d1 / 8.0);
    CHECK(d2 * 16.0 < d1 * 2.5); // ratio near 16, allow slack
}

TEST_CASE("jacobian matches central finite differences of rhs") {
    for (double scope : {1.0, 0.7}) {
        ModelParams p = baseline();
        p.scope = scope;
        for (const SystemState state :
             {SystemState{0.3, 0.2}, SystemState{0.7, 0.6}, SystemState{0.5, 0.5}}) {
            const auto j = jacobian(p, state);
            const double h = 1e-6;
            const auto fd = [&](bool by_h, bool of_h) {
                SystemState hi = state, lo = state;
                (by_h ? hi.h : hi.d) += h;
                (by_h ? lo.h : lo.d) -= h;
                const Deriv fhi = rhs(p, hi, hi.d);
                const Deriv flo = rhs(p, lo, lo.d);
                return ((of_h ? fhi.dh : fhi.dd) - (of_h ? flo.dh : flo.dd)) /
                       (2.0 * h);
            };
            CHECK(j[0][0] == doctest::Approx(fd(true, true)).epsilon(1e-6));
            CHECK(j[0][1] == doctest::Approx(fd(false, true)).epsilon(1e-6));
            CHECK(j[1][0] == doctest::Approx(fd(true, false)).epsilon(1e-6));
            CHECK(j[1][1] == doctest::Approx(fd(false, false)).epsilon(1e-6));
        }
    }
}

TEST_CASE("jacobian diagonals at the boundary points") {
    ModelParams p = baseline();
    const auto at_fp3 = jacobian(p, {0.0, 1.0});
    CHECK(at_fp3[0][0] == doctest::Approx(-p.beta).epsilon(1e-14));
    CHECK(at_fp3[1][1] ==
          doctest::Approx(-(p.gamma * p.k_ai + p.delta)).epsilon(1e-14));

    ModelParams strict = p;
    strict.epsilon = 0.0;
    const auto at_fp1 = jacobian(strict, {0.0, 0.0});
    CHECK(at_fp1[0][0] == doctest::Approx(strict.alpha).epsilon(1e-14));
    CHECK(at_fp1[1][1] == doctest::Approx(strict.gamma * strict.k_ai).epsilon(1e-14));
    CHECK(at_fp1[0][1] == doctest::Approx(0.0).scale(1));
    CHECK(at_fp1[1][0] == doctest::Approx(0.0).scale(1));
}

TEST_CASE("boundary fixed point eigenvalues and labels") {
    ModelParams p = baseline();
    const auto fps = boundary_fixed_points(p);

    // FP2 at K = 0.9: lambda2 = gamma (K - 1) = -0.05.
    CHECK(fps[1].eigenvalues[1] == doctest::Approx(-0.05).epsilon(1e-14));
    CHECK(fps[1].eigenvalues[0] ==
          doctest::Approx(-p.alpha * (1.0 + p.epsilon)).epsilon(1e-14));
    CHECK(fps[1].stability == Stability::stable_node);

    // FP3: (-beta, -(gamma K + delta)) = (-0.03, -0.95).
    CHECK(fps[2].eigenvalues[0] == doctest::Approx(-0.03).epsilon(1e-14));
    CHECK(fps[2].eigenvalues[1] == doctest::Approx(-0.95).epsilon(1e-14));
    CHECK(fps[2].stability == Stability::stable_node);

    // FP1 under the epsilon = 0 convention, flagged as regularized away.
    CHECK(fps[0].eigenvalues[0] == doctest::Approx(p.alpha).epsilon(1e-14));
    CHECK(fps[0].eigenvalues[1] == doctest::Approx(p.gamma * p.k_ai).epsilon(1e-14));
    CHECK(fps[0].stability == Stability::unstable_node);
    CHECK(fps[0].regularized_away);

    ModelParams at_one = p;
    at_one.k_ai = 1.0;
    const auto marginal = boundary_fixed_points(at_one);
    CHECK(marginal[1].eigenvalues[1] == 0.0);
    CHECK(marginal[1].stability == Stability::marginal);
}

TEST_CASE("closed-form eigenvalues match the numerical Jacobian to 1e-8") {
    for (double scope : {1.0, 0.7}) {
        ModelParams p = baseline();
        p.scope = scope;
        const auto fps = boundary_fixed_points(p);
        for (int i : {1, 2}) {
            const auto eig = eigenvalues_2x2(jacobian(p, fps[i].location));
            const double lo = std::min(eig[0], eig[1]);
            const double hi = std::max(eig[0], eig[1]);
            const double clo = std::min(fps[i].eigenvalues[0], fps[i].eigenvalues[1]);
            const double chi = std::max(fps[i].eigenvalues[0], fps[i].eigenvalues[1]);
            CHECK(lo == doctest::Approx(clo).epsilon(1e-8));
            CHECK(hi == doctest::Approx(chi).epsilon(1e-8));
        }
        ModelParams strict = p;
        strict.epsilon = 0.0;
        const auto eig = eigenvalues_2x2(jacobian(strict, {0.0, 0.0}));
        const auto fp1 = boundary_fixed_points(strict)[0];
        CHECK(std::min(eig[0], eig[1]) ==
              doctest::Approx(std::min(fp1.eigenvalues[0], fp1.eigenvalues[1]))
                  .epsilon(1e-8));
        CHECK(std::max(eig[0], eig[1]) ==
              doctest::Approx(std::max(fp1.eigenvalues[0], fp1.eigenvalues[1]))
                  .epsilon(1e-8));
    }
}

TEST_CASE("nullclines reproduce the closed forms") {
    ModelParams p = baseline();
    const std::vector<double> grid = {0.0, 0.5, 0.9, 1.0};
    const auto nc = nullclines(p, grid);

    CHECK(*nc.h_nullcline[0] ==
          doctest::Approx(p.alpha / (p.alpha + p.beta)).epsilon(1e-14));
    CHECK(*nc.h_nullcline[3] == doctest::Approx(0.0).scale(1));
    // D-nullcline is absent below H = K and zero at H = K.
    CHECK_FALSE(nc.d_nullcline[0].has_value());
    CHECK_FALSE(nc.d_nullcline[1].has_value());
    CHECK(*nc.d_nullcline[3] ==
          doctest::Approx(p.gamma * (1.0 - p.k_ai) / p.delta).epsilon(1e-12));

    ModelParams at_k = p;
    at_k.k_ai = 0.9;
    const std::vector<double> at = {0.9};
    CHECK(*nullclines(at_k, at).d_nullcline[0] == doctest::Approx(0.0).scale(1));
}

TEST_CASE("interior saddle exists below the bifurcation and vanishes above") {
    ModelParams p = baseline();
    for (double k : {0.6, 0.7, 0.8}) {
        p.k_ai = k;
        const auto saddle = interior_saddle(p);
        REQUIRE(saddle.has_value());
        CHECK(saddle->label == FixedPointLabel::interior);
        CHECK(saddle->stability == Stability::saddle);
        CHECK(saddle->eigenvalues[0] * saddle->eigenvalues[1] < 0.0);

        // Oracle: dense-grid sign change of the nullcline difference.
        const auto residual = [&](double h) {
            const double a = p.alpha * (h + p.epsilon) * (1.0 - h);
            const double h_null = a / (p.scope * (a + p.beta * h));
            return h_null - p.gamma * (h - k) / p.delta;
        };
        bool bracketed = false;
        const int cells = 2000;
        for (int i = 0; i < cells; ++i) {
            const double lo = k + (1.0 - k) * i / cells;
            const double hi = k + (1.0 - k) * (i + 1) / cells;
            if (residual(lo) * residual(hi) <= 0.0) {
                bracketed = true;
                CHECK(saddle->location.h >= lo - 1e-9);
                CHECK(saddle->location.h <= hi + 1e-9);
                break;
            }
        }
        CHECK(bracketed);

        // Nullcline consistency: the saddle is a genuine equilibrium.
        const Deriv d = rhs(p, saddle->location, saddle->location.d);
        CHECK(std::abs(d.dh) < 1e-8);
        CHECK(std::abs(d.dd) < 1e-8);
    }

    for (double k : {1.0, 1.1}) {
        p.k_ai = k;
        CHECK_FALSE(interior_saddle(p).has_value());
    }
}

TEST_CASE("saddle merges with FP2 as K approaches one") {
    ModelParams p = baseline();
    double previous = 0.0;
    for (double k : {0.97, 0.99, 0.999}) {
        p.k_ai = k;
        const auto saddle = interior_saddle(p);
        REQUIRE(saddle.has_value());
        CHECK(saddle->location.h > previous);
        previous = saddle->location.h;
    }
    CHECK(previous > 0.99);
}

TEST_CASE("interior saddle respects the scoped capability equation") {
    ModelParams p = baseline();
    p.scope = 0.7;
    p.k_ai = 0.7;
    const auto saddle = interior_saddle(p);
    REQUIRE(saddle.has_value());
    const Deriv d = rhs(p, saddle->location, saddle->location.d);
    CHECK(std::abs(d.dh) < 1e-8);
    CHECK(std::abs(d.dd) < 1e-8);
}

TEST_CASE("classify_basin labels the paper scenarios decisively") {
    ModelParams p = baseline();
    p.k_ai = 0.7;
    CHECK(classify_basin(p, {0.95, 0.02}) == BasinLabel::autonomous);
    CHECK(classify_basin(p, {0.05, 0.95}) == BasinLabel::dependent);
    CHECK(classify_basin(p, {1.0, 0.0}) == BasinLabel::autonomous);
}

TEST_CASE("bistability at K = 0.7 and monostability past the bifurcation") {
    ModelParams p = baseline();
    p.k_ai = 0.7;
    CHECK(classify_basin(p, {0.95, 0.02}) == BasinLabel::autonomous);
    CHECK(classify_basin(p, {0.05, 0.95}) == BasinLabel::dependent);

    p.k_ai = 1.05;
    for (double h0 : {0.1, 0.5, 0.9}) {
        for (double d0 : {0.1, 0.5, 0.9}) {
            CHECK(classify_basin(p, {h0, d0}) == BasinLabel::dependent);
        }
    }
}

TEST_CASE("equilibrium_vs_k traces the two branches") {
    ModelParams p = baseline();
    std::vector<double> k_grid;
    for (int i = 0; i <= 12; ++i) k_grid.push_back(1.2 * i / 12.0);

    const auto dependent = equilibrium_vs_k(p, k_grid, {0.05, 0.95});
    for (double h : dependent) CHECK(h < 1e-3);

    const auto autonomous = equilibrium_vs_k(p, k_grid, {0.95, 0.02});
    CHECK(autonomous[5] == doctest::Approx(1.0).epsilon(1e-3)); // K = 0.5
    for (std::size_t i = 0; i + 1 < autonomous.size(); ++i)
        CHECK(autonomous[i + 1] <= autonomous[i] + 1e-9);
    CHECK(autonomous.back() < 0.1); // K = 1.2 is past the bifurcation
}

TEST_CASE("recovery_time matches the closed-form solution at d = 0") {
    // With d = 0 the capability equation integrates to
    // t(eps) = ln((h1 + eps) (1 - h0) / ((h0 + eps) (1 - h1))) / (alpha (1 + eps)).
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.5;
    for (double eps : {0.01, 0.25}) {
        p.epsilon = eps;
        const auto result = recovery_time(p, 0.0, 0.5, 0.0);
        REQUIRE(result.status == RecoveryStatus::reached);
        const double expected =
            std::log((0.5 + eps) * 1.0 / (eps * 0.5)) / (p.alpha * (1.0 + eps));
        CHECK(result.time == doctest::Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("recovery_time ratio and monotonicity in epsilon") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.5;

    p.epsilon = 0.01;
    const double slow = recovery_time(p, 0.0, 0.5, 0.0).time;
    p.epsilon = 0.25;
    const double fast = recovery_time(p, 0.0, 0.5, 0.0).time;
    const double ratio = slow / fast;
    CHECK(ratio >= 2.3);
    CHECK(ratio <= 3.3);

    double previous = slow;
    for (double eps : {0.05, 0.1, 0.25, 0.5}) {
        p.epsilon = eps;
        const double t = recovery_time(p, 0.0, 0.5, 0.0).time;
        CHECK(t <= previous);
        previous = t;
    }
}

TEST_CASE("recovery_time reports an exceeded horizon distinctly") {
    ModelParams p = baseline();
    p.alpha = 1e-9; // positive drift, far too slow to arrive
    const auto result = recovery_time(p, 0.0, 0.5, 0.0);
    CHECK(result.status == RecoveryStatus::exceeds_horizon);
    CHECK(result.time == 1e5);
}

TEST_CASE("recovery_time edge cases") {
    ModelParams p = baseline();
    CHECK(recovery_time(p, 0.4, 0.4, 0.0).time == 0.0);

    // High fixed delegation makes the derivative negative: unreachable.
    const auto blocked = recovery_time(p, 0.5, 0.9, 0.9);
    CHECK(blocked.status == RecoveryStatus::unreachable);

    CHECK_THROWS_AS(recovery_time(p, 0.6, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(recovery_time(p, 0.0, 0.5, 1.0), std::invalid_argument);
}

namespace {

ModelParams skill_params(double k) {
    ModelParams p;
    p.scope = 1.0;
    p.k_ai = k;
    return p;
}

} // namespace

TEST_CASE("two-skill scenario A collapses only the exposed skill") {
    const TwoSkillState initial{0.8, 0.8, 0.1, 0.1, 0.5, 0.5};
    const auto traj = simulate_two_skill(skill_params(0.95), skill_params(0.30),
                                         TwoSkillScenario::no_reallocation, initial,
                                         600.0, 0.1);
    CHECK(traj.final_state().h1 < 0.2);
    CHECK(traj.final_state().h2 >= 0.9);
    for (const auto& st : traj.states) {
        CHECK(st.tau1 + st.tau2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("two-skill scenario C collapses both under broad capability") {
    const TwoSkillState initial{0.8, 0.8, 0.1, 0.1, 0.5, 0.5};
    const auto traj = simulate_two_skill(skill_params(0.95), skill_params(0.95),
                                         TwoSkillScenario::both_skills, initial,
                                         600.0, 0.1);
    CHECK(traj.aggregate_h.back() < 0.2);
}

TEST_CASE("two-skill reallocation dominates no-reallocation at every step") {
    const TwoSkillState initial{0.8, 0.8, 0.1, 0.1, 0.5, 0.5};
    const auto a = simulate_two_skill(skill_params(0.95), skill_params(0.30),
                                      TwoSkillScenario::no_reallocation, initial,
                                      600.0, 0.1);
    const auto b = simulate_two_skill(skill_params(0.95), skill_params(0.30),
                                      TwoSkillScenario::full_reallocation, initial,
                                      600.0, 0.1);
    REQUIRE(a.aggregate_h.size() == b.aggregate_h.size());
    for (std::size_t i = 0; i < a.aggregate_h.size(); ++i)
        CHECK(b.aggregate_h[i] >= a.aggregate_h[i] - 1e-9);
    CHECK(b.aggregate_h.back() > a.aggregate_h.back());
}

TEST_CASE("two-skill with no delegation approaches full capability") {
    const TwoSkillState initial{0.5, 0.5, 0.0, 0.0, 0.5, 0.5};
    const auto traj = simulate_two_skill(skill_params(0.5), skill_params(0.5),
                                         TwoSkillScenario::no_reallocation, initial,
                                         800.0, 0.1);
    CHECK(traj.final_state().h1 > 0.95);
    CHECK(traj.final_state().h2 > 0.95);
    CHECK(traj.final_state().d1 == 0.0);
}
