#include "capdyn/abm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capdyn/parallel.hpp"
#include "capdyn/stats.hpp"

namespace capdyn::abm {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace

void AbmConfig::validate() const {
    params.validate();
    require(n_agents >= 1, "abm.n_agents must be >= 1");
    require(t_steps >= 1, "abm.t_steps must be >= 1");
    require(dt > 0.0, "abm.dt must be > 0");
    require(sigma_h >= 0.0 && sigma_d >= 0.0, "abm noise scales must be >= 0");
    require(p_crisis >= 0.0 && p_crisis <= 1.0, "abm.p_crisis out of range [0, 1]");
    require(practice_fraction >= 0.0 && practice_fraction <= 0.5,
            "abm.practice_fraction out of range [0, 0.5]");
    require(turnover_rate >= 0.0 && turnover_rate <= 1.0,
            "abm.turnover_rate out of range [0, 1]");
    require(h_entry >= 0.0 && h_entry <= 1.0, "abm.h_entry out of range [0, 1]");
    require(init_h_mean >= 0.0 && init_h_mean <= 1.0 && init_h_sd >= 0.0,
            "abm initial H distribution out of range");
    require(init_d_mean >= 0.0 && init_d_mean <= 1.0 && init_d_sd >= 0.0,
            "abm initial D distribution out of range");
}

double AgentPopulation::mean_h() const {
    double s = 0.0;
    for (double x : h) s += x;
    return s / static_cast<double>(h.size());
}

double AgentPopulation::mean_d() const {
    double s = 0.0;
    for (double x : d) s += x;
    return s / static_cast<double>(d.size());
}

bool practice_step(double practice_fraction, int step_index) {
    if (practice_fraction <= 0.0) return false;
    const double f = practice_fraction;
    return std::floor(static_cast<double>(step_index + 1) * f) >
           std::floor(static_cast<double>(step_index) * f);
}

AgentPopulation init_population(const AbmConfig& config, SplitMix64& rng) {
    config.validate();
    AgentPopulation pop;
    pop.h.resize(static_cast<std::size_t>(config.n_agents));
    pop.d.resize(static_cast<std::size_t>(config.n_agents));
    for (int i = 0; i < config.n_agents; ++i) {
        pop.h[static_cast<std::size_t>(i)] =
            clamp01(config.init_h_mean + config.init_h_sd * rng.next_gaussian());
        pop.d[static_cast<std::size_t>(i)] =
            clamp01(config.init_d_mean + config.init_d_sd * rng.next_gaussian());
    }
    return pop;
}

StepInfo step(AgentPopulation& pop, const AbmConfig& config, int step_index,
              SplitMix64& rng) {
    const auto n = static_cast<std::size_t>(config.n_agents);
    if (pop.h.size() != n || pop.d.size() != n)
        throw std::invalid_argument("abm::step: population size mismatch");
    const ModelParams& p = config.params;
    const double dt = config.dt;

    // (1) Crisis / mandatory-practice determination.  The crisis uniform is
    // drawn every step so runs with different p_crisis share one noise
    // realization per seed.
    const bool crisis = rng.next_unit() < config.p_crisis;
    const bool ai_free = crisis || practice_step(config.practice_fraction, step_index);
    if (crisis && config.crisis_reset == CrisisReset::persistent)
        std::fill(pop.d.begin(), pop.d.end(), 0.0);

    // (2) Capability update on the delegation draw.  The adoption update in
    // (3) reads this pre-update snapshot so one step is an exact explicit
    // Euler step of the coupled equations in the mean-field limit.
    const std::vector<double> h_pre = pop.h;
    const double draw_scale = config.scope_in_delegation_draw ? p.scope : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p_del = ai_free ? 0.0 : clamp01(pop.d[i] * draw_scale);
        const double u = rng.next_unit();
        const double noise = config.sigma_h * rng.next_gaussian();
        const double gain = p.alpha * (pop.h[i] + p.epsilon) * (1.0 - pop.h[i]) * dt;
        const double loss = p.beta * pop.h[i] * dt;
        double h = pop.h[i];
        if (config.delegation_draw == DelegationDraw::expectation) {
            h += (1.0 - p_del) * gain - p_del * loss + noise;
        } else if (u < p_del) {
            h += -loss + noise;
        } else {
            h += gain + noise;
        }
        pop.h[i] = clamp01(h);
    }

    // (3) Synchronous delegation update; the social term sees the mean of all
    // other agents' pre-update D (own D in the single-agent mean-field case).
    const std::vector<double> d_pre = pop.d;
    double sum_d = 0.0;
    for (double x : d_pre) sum_d += x;
    const double social_scale = config.scope_in_social ? p.scope : 1.0;
    const bool adoption_paused = ai_free && config.ai_free_pauses_adoption;
    for (std::size_t i = 0; i < n; ++i) {
        const double d_avg =
            social_scale *
            (n > 1 ? (sum_d - d_pre[i]) / static_cast<double>(n - 1) : d_pre[i]);
        const double incr =
            adoption_paused
                ? 0.0
                : (p.gamma * (p.k_ai - h_pre[i]) * (1.0 - d_pre[i]) * d_pre[i] +
                   p.delta * d_pre[i] * (1.0 - d_pre[i]) * d_avg) *
                      dt;
        const double noise = config.sigma_d * rng.next_gaussian();
        double d = clamp01(d_pre[i] + incr + noise);
        if (config.scope_caps_delegation) d = std::min(d, p.scope);
        pop.d[i] = d;
    }

    // (4) Turnover: replacements see the post-update population means.
    const double mean_h_now = pop.mean_h();
    const double mean_d_now = pop.mean_d();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        if (u < config.turnover_rate) {
            pop.h[i] = config.entry_mode == EntryMode::fixed ? config.h_entry
                                                             : mean_h_now;
            pop.d[i] = mean_d_now;
        }
    }

    return {crisis, ai_free};
}

RunSummary run(const AbmConfig& config) {
    config.validate();
    SplitMix64 rng(config.seed);
    AgentPopulation pop = init_population(config, rng);

    RunSummary summary;
    summary.mean_h.reserve(static_cast<std::size_t>(config.t_steps) + 1);
    summary.mean_d.reserve(static_cast<std::size_t>(config.t_steps) + 1);
    summary.mean_h.push_back(pop.mean_h());
    summary.mean_d.push_back(pop.mean_d());

    for (int t = 0; t < config.t_steps; ++t) {
        const StepInfo info = step(pop, config, t, rng);
        summary.mean_h.push_back(pop.mean_h());
        summary.mean_d.push_back(pop.mean_d());
        if (info.crisis) {
            summary.crisis_steps.push_back(t);
            const double m = summary.mean_h.back();
            if (!summary.min_h_during_crisis || m < *summary.min_h_during_crisis)
                summary.min_h_during_crisis = m;
        }
    }

    const std::size_t n_recorded = summary.mean_h.size();
    const std::size_t window = std::min<std::size_t>(20, n_recorded);
    double acc = 0.0;
    for (std::size_t i = n_recorded - window; i < n_recorded; ++i)
        acc += summary.mean_h[i];
    summary.equilibrium_h = acc / static_cast<double>(window);
    return summary;
}

EnsembleStats run_ensemble(const AbmConfig& config, int n_replicates, int threads) {
    if (n_replicates < 1)
        throw std::invalid_argument("run_ensemble: n_replicates must be >= 1");
    config.validate();

    EnsembleStats stats;
    stats.equilibrium_values.resize(static_cast<std::size_t>(n_replicates));
    parallel_for(static_cast<std::size_t>(n_replicates), threads,
                 [&](std::size_t r) {
                     AbmConfig cfg = config;
                     cfg.seed = mix_seed(config.seed, r);
                     stats.equilibrium_values[r] = run(cfg).equilibrium_h;
                 });

    stats.mean = capdyn::mean(stats.equilibrium_values);
    stats.median = capdyn::median(stats.equilibrium_values);
    const Iqr q = iqr(stats.equilibrium_values);
    stats.iqr_lo = q.lo;
    stats.iqr_hi = q.hi;
    return stats;
}

} // namespace capdyn::abm
