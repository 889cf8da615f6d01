#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capdyn/abm.hpp"
#include "capdyn/ode.hpp"

using namespace capdyn;
using namespace capdyn::abm;

namespace {

AbmConfig experiment_config() {
    AbmConfig cfg;
    cfg.p_crisis = 0.05;
    cfg.turnover_rate = 0.02;
    cfg.init_h_mean = 0.95;
    cfg.init_d_mean = 0.10;
    cfg.seed = 42;
    return cfg;
}

} // namespace

TEST_CASE("init_population with zero spread is exact") {
    AbmConfig cfg;
    cfg.init_h_sd = 0.0;
    cfg.init_d_sd = 0.0;
    SplitMix64 rng(1);
    const auto pop = init_population(cfg, rng);
    for (int i = 0; i < cfg.n_agents; ++i) {
        CHECK(pop.h[static_cast<std::size_t>(i)] == 0.8);
        CHECK(pop.d[static_cast<std::size_t>(i)] == 0.1);
    }
}

TEST_CASE("init_population sample mean stays near the configured mean") {
    // The mean of 100 draws at sd 0.05 has sd 0.005; five sigma is 0.025.
    AbmConfig cfg;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(mix_seed(7, seed));
        const auto pop = init_population(cfg, rng);
        CHECK(std::abs(pop.mean_h() - 0.8) < 0.025);
        CHECK(std::abs(pop.mean_d() - 0.1) < 0.011);
    }
}

TEST_CASE("init_population is bit-identical for identical seeds") {
    AbmConfig cfg;
    SplitMix64 a(99), b(99);
    const auto pa = init_population(cfg, a);
    const auto pb = init_population(cfg, b);
    CHECK(pa.h == pb.h);
    CHECK(pa.d == pb.d);
}

TEST_CASE("crisis forces an AI-free step so forgetting never applies") {
    AbmConfig cfg;
    cfg.p_crisis = 1.0;
    cfg.sigma_h = 0.0;
    cfg.sigma_d = 0.0;
    cfg.init_h_sd = 0.0;
    cfg.init_d_sd = 0.0;
    cfg.turnover_rate = 0.0;
    SplitMix64 rng(5);
    auto pop = init_population(cfg, rng);
    for (int t = 0; t < 10; ++t) {
        const double before = pop.mean_h();
        const StepInfo info = step(pop, cfg, t, rng);
        CHECK(info.crisis);
        CHECK(info.ai_free);
        CHECK(pop.mean_h() > before); // everyone practices, nobody forgets
    }
}

TEST_CASE("expectation-mode single agent reproduces explicit Euler exactly") {
    AbmConfig cfg;
    cfg.n_agents = 1;
    cfg.sigma_h = 0.0;
    cfg.sigma_d = 0.0;
    cfg.init_h_sd = 0.0;
    cfg.init_d_sd = 0.0;
    cfg.p_crisis = 0.0;
    cfg.turnover_rate = 0.0;
    cfg.delegation_draw = DelegationDraw::expectation;
    cfg.params.scope = 1.0;
    cfg.params.k_ai = 0.9;

    SplitMix64 rng(3);
    auto pop = init_population(cfg, rng);
    double h = 0.8, d = 0.1;
    for (int t = 0; t < 200; ++t) {
        step(pop, cfg, t, rng);
        const ode::Deriv deriv = ode::rhs(cfg.params, {h, d}, d);
        h = std::clamp(h + deriv.dh, 0.0, 1.0);
        d = std::clamp(d + deriv.dd, 0.0, 1.0);
        CHECK(pop.h[0] == doctest::Approx(h).epsilon(1e-12));
        CHECK(pop.d[0] == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("full turnover with fixed entry resets every agent") {
    AbmConfig cfg;
    cfg.turnover_rate = 1.0;
    cfg.entry_mode = EntryMode::fixed;
    cfg.h_entry = 0.5;
    SplitMix64 rng(11);
    auto pop = init_population(cfg, rng);
    step(pop, cfg, 0, rng);
    for (double h : pop.h) CHECK(h == 0.5);
}

TEST_CASE("mandatory practice fires on the periodic schedule") {
    CHECK_FALSE(practice_step(0.0, 3));
    int fired = 0;
    for (int i = 0; i < 200; ++i) fired += practice_step(0.2, i) ? 1 : 0;
    CHECK(fired == 40);
    // f = 0.2 means every 5th step: indices 4, 9, 14, ...
    CHECK(practice_step(0.2, 4));
    CHECK_FALSE(practice_step(0.2, 3));
    int fired4 = 0;
    for (int i = 0; i < 200; ++i) fired4 += practice_step(0.4, i) ? 1 : 0;
    CHECK(fired4 == 80);
}

TEST_CASE("states remain inside the unit square for every seed") {
    for (std::uint64_t seed : {1ULL, 17ULL, 123456789ULL}) {
        AbmConfig cfg = experiment_config();
        cfg.params.k_ai = 0.9;
        cfg.p_crisis = 0.2;
        cfg.practice_fraction = 0.3;
        cfg.seed = seed;
        SplitMix64 rng(cfg.seed);
        auto pop = init_population(cfg, rng);
        for (int t = 0; t < cfg.t_steps; ++t) {
            step(pop, cfg, t, rng);
            for (double h : pop.h) {
                CHECK(h >= 0.0);
                CHECK(h <= 1.0);
            }
            for (double d : pop.d) {
                CHECK(d >= 0.0);
                CHECK(d <= 1.0);
            }
        }
    }
}

TEST_CASE("run is deterministic in the seed") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;
    const RunSummary a = run(cfg);
    const RunSummary b = run(cfg);
    CHECK(a.equilibrium_h == b.equilibrium_h);
    CHECK(a.mean_h == b.mean_h);
    CHECK(a.crisis_steps == b.crisis_steps);

    cfg.seed = 43;
    const RunSummary c = run(cfg);
    CHECK(a.equilibrium_h != c.equilibrium_h);
}

TEST_CASE("run records crisis bookkeeping") {
    AbmConfig cfg = experiment_config();
    cfg.p_crisis = 0.5;
    const RunSummary summary = run(cfg);
    CHECK_FALSE(summary.crisis_steps.empty());
    REQUIRE(summary.min_h_during_crisis.has_value());
    CHECK(*summary.min_h_during_crisis <= summary.mean_h.front());
    for (int t : summary.crisis_steps) {
        CHECK(t >= 0);
        CHECK(t < cfg.t_steps);
    }

    cfg.p_crisis = 0.0;
    const RunSummary quiet = run(cfg);
    CHECK(quiet.crisis_steps.empty());
    CHECK_FALSE(quiet.min_h_during_crisis.has_value());
}

TEST_CASE("safe region: K = 0.5 keeps capability high for any seed") {
    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
        AbmConfig cfg = experiment_config();
        cfg.params.k_ai = 0.5;
        cfg.seed = seed;
        CHECK(run(cfg).equilibrium_h > 0.8);
    }
}

TEST_CASE("ensemble statistics for a single replicate are degenerate") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;
    const EnsembleStats stats = run_ensemble(cfg, 1);
    CHECK(stats.median == stats.mean);
    CHECK(stats.iqr_lo == stats.median);
    CHECK(stats.iqr_hi == stats.median);
}

TEST_CASE("ensembles are bit-identical across thread counts") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;
    const EnsembleStats serial = run_ensemble(cfg, 16, 1);
    const EnsembleStats parallel = run_ensemble(cfg, 16, 4);
    CHECK(serial.equilibrium_values == parallel.equilibrium_values);
    CHECK(serial.median == parallel.median);
}

TEST_CASE("headline ensemble medians at K = 0.9") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;

    cfg.p_crisis = 0.0;
    const double no_crisis = run_ensemble(cfg, 50).median;
    CHECK(no_crisis == doctest::Approx(0.127).epsilon(0.4));

    cfg.p_crisis = 0.05;
    const double background = run_ensemble(cfg, 50).median;
    CHECK(background > no_crisis);
    CHECK(background == doctest::Approx(0.16).epsilon(0.4));
}

TEST_CASE("crisis benefit is monotone across the tested frequencies") {
    double previous = -1.0;
    for (double pc : {0.0, 0.05, 0.12, 0.20, 0.25}) {
        AbmConfig cfg = experiment_config();
        cfg.params.k_ai = 0.9;
        cfg.p_crisis = pc;
        const double median = run_ensemble(cfg, 50).median;
        CHECK(median >= previous);
        previous = median;
    }
}

TEST_CASE("mandatory practice strictly improves the median at K = 0.9") {
    double previous = -1.0;
    for (double f : {0.0, 0.1, 0.2, 0.3, 0.4}) {
        AbmConfig cfg = experiment_config();
        cfg.params.k_ai = 0.9;
        cfg.p_crisis = 0.05;
        cfg.practice_fraction = f;
        const double median = run_ensemble(cfg, 50).median;
        CHECK(median > previous);
        previous = median;
    }
}

TEST_CASE("fixed entry capability does not underperform population-mean entry") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;
    const double pop_mean = run_ensemble(cfg, 50).median;

    cfg.entry_mode = EntryMode::fixed;
    cfg.h_entry = 0.5;
    const double fixed_entry = run_ensemble(cfg, 50).median;
    CHECK(fixed_entry >= pop_mean);
}

TEST_CASE("persistent crisis reset is selectable and more disruptive to adoption") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.9;
    cfg.p_crisis = 0.10;
    const double transient = run_ensemble(cfg, 30).median;
    cfg.crisis_reset = CrisisReset::persistent;
    const double persistent = run_ensemble(cfg, 30).median;
    CHECK(persistent > transient);
}

TEST_CASE("scope ceiling option caps stored delegation") {
    AbmConfig cfg = experiment_config();
    cfg.params.k_ai = 0.95;
    cfg.params.scope = 0.7;
    cfg.scope_caps_delegation = true;
    SplitMix64 rng(cfg.seed);
    auto pop = init_population(cfg, rng);
    for (int t = 0; t < 100; ++t) {
        step(pop, cfg, t, rng);
        for (double d : pop.d) CHECK(d <= 0.7 + 1e-12);
    }
}

TEST_CASE("config validation names the offending field") {
    AbmConfig cfg;
    cfg.n_agents = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "abm.n_agents must be >= 1",
                         std::invalid_argument);
    cfg = AbmConfig{};
    cfg.p_crisis = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = AbmConfig{};
    cfg.params.k_ai = 1.3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
