#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "capdyn/model.hpp"
#include "capdyn/rng.hpp"

namespace capdyn::abm {

/// How replaced agents re-enter the population.
enum class EntryMode { population_mean, fixed };

/// Per-agent delegation decision: a Bernoulli draw, or (for checking the
/// mean-field limit) the deterministic expectation of the two branches.
enum class DelegationDraw { bernoulli, expectation };

/// Whether a crisis only suppresses delegation for the step (transient) or
/// also resets every stored D_i to zero (persistent).
enum class CrisisReset { transient, persistent };

struct AbmConfig {
    int n_agents = 100;
    int t_steps = 200;
    double dt = 1.0;
    double sigma_h = 0.01;  ///< capability noise scale
    double sigma_d = 0.005; ///< delegation noise scale
    double p_crisis = 0.0;  ///< per-step probability that AI is unavailable
    double practice_fraction = 0.0; ///< mandated AI-free fraction, in [0, 0.5]
    double turnover_rate = 0.0;     ///< per-agent per-step replacement probability
    EntryMode entry_mode = EntryMode::population_mean;
    double h_entry = 0.5; ///< entrant capability under EntryMode::fixed
    double init_h_mean = 0.8, init_h_sd = 0.05;
    double init_d_mean = 0.1, init_d_sd = 0.02;
    ModelParams params;
    std::uint64_t seed = 42;
    DelegationDraw delegation_draw = DelegationDraw::bernoulli;
    CrisisReset crisis_reset = CrisisReset::transient;
    bool scope_caps_delegation = false; ///< optional ceiling D_i <= scope
    /// Where the delegable-task fraction enters the stochastic step:
    /// the per-task delegation probability (scope * D_i) and/or the social
    /// coupling, which then sees the observed effective delegation
    /// scope * mean(D) instead of the raw propensity mean.
    bool scope_in_delegation_draw = true;
    bool scope_in_social = false;
    /// AI-free steps (crisis or mandated practice) treat effective D_i = 0
    /// in the adoption update too, freezing delegation for the step.
    bool ai_free_pauses_adoption = false;

    void validate() const;
};

/// Per-agent capability and delegation vectors; every entry stays in [0, 1].
struct AgentPopulation {
    std::vector<double> h;
    std::vector<double> d;

    double mean_h() const;
    double mean_d() const;
};

struct RunSummary {
    double equilibrium_h = 0.0; ///< mean of population-mean H, final 20 steps
    std::optional<double> min_h_during_crisis;
    std::vector<double> mean_h; ///< population mean after each step (t_steps + 1)
    std::vector<double> mean_d;
    std::vector<int> crisis_steps;
};

/// True on the steps where the mandatory-practice schedule fires: step i is
/// AI-free when floor((i + 1) f) > floor(i f), e.g. every 5th step at f = 0.2.
bool practice_step(double practice_fraction, int step_index);

/// Draw the initial population: H_i = 0.8 + 0.05 N(0,1),
/// D_i = 0.1 + 0.02 N(0,1) (configurable), clamped, consuming the stream in
/// agent order (H then D per agent).
AgentPopulation init_population(const AbmConfig& config, SplitMix64& rng);

struct StepInfo {
    bool crisis = false;  ///< the stochastic crisis fired this step
    bool ai_free = false; ///< crisis or scheduled mandatory practice
};

/// Advance the population by one step.  Order: crisis/policy determination,
/// per-agent capability update on the delegation draw, synchronous
/// delegation update against the mean of the other agents, turnover.
StepInfo step(AgentPopulation& pop, const AbmConfig& config, int step_index,
              SplitMix64& rng);

/// Full run: init, t_steps steps, summary.  Deterministic in config.seed.
RunSummary run(const AbmConfig& config);

struct EnsembleStats {
    double median = 0.0;
    double mean = 0.0;
    double iqr_lo = 0.0;
    double iqr_hi = 0.0;
    std::vector<double> equilibrium_values; ///< one per replicate, in order
};

/// Replicate r runs with seed mix_seed(config.seed, r); statistics are taken
/// over the replicate equilibrium_h values.  `threads` <= 0 picks the
/// hardware default.  Results are identical for any thread count.
EnsembleStats run_ensemble(const AbmConfig& config, int n_replicates,
                           int threads = 0);

} // namespace capdyn::abm
