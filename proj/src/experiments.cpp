#include "capdyn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "capdyn/config_keys.hpp"
#include "capdyn/ode.hpp"
#include "capdyn/sweep.hpp"
#include "capdyn/two_skill.hpp"

namespace capdyn::io {

namespace {

using estimation::ModelKind;

int replicates_or(const RunConfig& config, int preset_default) {
    return config.replicates > 0 ? config.replicates : preset_default;
}

// ------------------------------------------------------------ fig1

std::vector<Table> fig1_calibration(const RunConfig& config) {
    const auto observations = ingest_deskill(config.data_dir / "deskill.csv");
    std::vector<Table> tables;

    Table summary("calibration_table",
                  {"domain", "decline", "duration", "time_unit", "beta_eff"});
    for (const auto& obs : observations) {
        const double beta = estimation::beta_eff(obs);
        summary.add_row({obs.domain, obs.decline, obs.duration, obs.time_unit, beta});

        Table curve("decline_" + obs.domain, {"t", "h"});
        const int points = 60;
        std::vector<double> grid;
        for (int i = 0; i <= points; ++i)
            grid.push_back(1.2 * obs.duration * i / points);
        const auto h = estimation::predict_decline_curve(beta, 1.0, 1.0, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            curve.add_row({grid[i], h[i]});
        tables.push_back(std::move(curve));
    }
    tables.insert(tables.begin(), std::move(summary));
    return tables;
}

// ------------------------------------------------------------ fig2

std::vector<Table> fig2_pisa_panel(const RunConfig& config) {
    const auto panel =
        load_panel(config.data_dir / "pisa.csv", config.data_dir / "adoption.csv");
    const auto oecd = load_oecd_series(config.data_dir / "pisa.csv");

    const auto fit = estimation::fit_ode_panel(panel);
    Table summary("panel_fit_summary",
                  {"alpha", "beta", "h_max", "r_squared", "rmse", "aic", "bic",
                   "n_params", "n_obs"});
    summary.add_row({fit.param("alpha"), fit.param("beta"), fit.param("h_max"),
                     fit.r_squared, fit.rmse, fit.aic, fit.bic, fit.n_params,
                     fit.n_obs});

    Table predictions("panel_predictions",
                      {"country", "year", "observed", "predicted", "residual"});
    for (std::size_t i = 0; i < panel.observations.size(); ++i) {
        const auto& obs = panel.observations[i];
        predictions.add_row({obs.country, obs.year, obs.score,
                             obs.score - fit.residuals[i], fit.residuals[i]});
    }

    const auto profile_single =
        estimation::profile_likelihood_alpha(oecd, estimation::oecd_default_driver());
    const auto profile_panel = estimation::profile_likelihood_alpha(panel);
    Table profiles("profile_likelihood", {"series", "alpha", "log_likelihood"});
    for (std::size_t i = 0; i < profile_single.alpha.size(); ++i)
        profiles.add_row({"oecd-average", profile_single.alpha[i],
                          profile_single.log_likelihood[i]});
    for (std::size_t i = 0; i < profile_panel.alpha.size(); ++i)
        profiles.add_row(
            {"panel", profile_panel.alpha[i], profile_panel.log_likelihood[i]});

    Table ci("profile_summary",
             {"series", "alpha_mle", "ci_lo", "ci_hi", "ci_decades"});
    ci.add_row({"oecd-average", profile_single.alpha_mle, profile_single.ci_lo,
                profile_single.ci_hi, profile_single.ci_decades()});
    ci.add_row({"panel", profile_panel.alpha_mle, profile_panel.ci_lo,
                profile_panel.ci_hi, profile_panel.ci_decades()});

    std::vector<Table> tables;
    tables.push_back(std::move(summary));
    tables.push_back(std::move(predictions));
    tables.push_back(std::move(profiles));
    tables.push_back(std::move(ci));
    return tables;
}

// ------------------------------------------------------------ fig3

std::vector<Table> fig3_model_comparison(const RunConfig& config) {
    const auto oecd = load_oecd_series(config.data_dir / "pisa.csv");
    const auto driver = estimation::oecd_default_driver();

    std::vector<double> t;
    for (int year : oecd.years) t.push_back(year - oecd.years.front());
    std::vector<estimation::FitResult> fits;
    fits.push_back(estimation::fit_ode_single(oecd, driver));
    fits.push_back(estimation::fit_alt_model(ModelKind::linear, t, oecd.scores));
    fits.push_back(estimation::fit_alt_model(ModelKind::exponential, t, oecd.scores));
    fits.push_back(estimation::fit_alt_model(ModelKind::logistic, t, oecd.scores));

    Table comparison("model_comparison",
                     {"model", "n_params", "r_squared", "rmse", "aic", "bic",
                      "delta_aic", "delta_bic"});
    for (const auto& row : estimation::compare_models(fits))
        comparison.add_row({estimation::model_kind_name(row.kind), row.n_params,
                            row.r_squared, row.rmse, row.aic, row.bic, row.delta_aic,
                            row.delta_bic});

    // Panel B: post-removal recovery on the synthetic exposure scenario.
    const auto scenario = recovery_scenario();
    const std::vector<double> exposure =
        estimation::cumulative_exposure(scenario, scenario.times);
    estimation::SingleSeries scenario_series;
    for (double time : scenario.times)
        scenario_series.years.push_back(static_cast<int>(time));
    scenario_series.scores = scenario.values;
    estimation::OdeFitOptions ode_options;
    ode_options.h_max = 1.0;
    ode_options.epsilon = scenario.epsilon;
    std::vector<estimation::FitResult> scenario_fits;
    scenario_fits.push_back(
        estimation::fit_ode_single(scenario_series, scenario.driver, ode_options));
    scenario_fits.push_back(
        estimation::fit_alt_model(ModelKind::linear, exposure, scenario.values));
    scenario_fits.push_back(
        estimation::fit_alt_model(ModelKind::exponential, exposure, scenario.values));
    scenario_fits.push_back(
        estimation::fit_alt_model(ModelKind::logistic, exposure, scenario.values));
    const auto trajectories = estimation::recovery_comparison(scenario_fits, scenario);

    Table recovery("recovery_trajectories", {"model", "t", "value"});
    Table recovery_summary("recovery_summary",
                           {"model", "baseline", "value_at_removal", "gain",
                            "gap_closed_fraction"});
    for (const auto& traj : trajectories) {
        for (std::size_t i = 0; i < traj.times.size(); i += 5)
            recovery.add_row({estimation::model_kind_name(traj.kind), traj.times[i],
                              traj.values[i]});
        recovery_summary.add_row({estimation::model_kind_name(traj.kind),
                                  traj.baseline, traj.value_at_removal, traj.gain,
                                  traj.gap_closed_fraction});
    }

    // Panel C: the deterministic equilibrium branches against K.
    ModelParams params;
    std::vector<double> k_grid;
    for (int i = 0; i <= 60; ++i) k_grid.push_back(1.2 * i / 60.0);
    const auto autonomous =
        ode::equilibrium_vs_k(params, k_grid, {0.95, 0.02});
    const auto dependent = ode::equilibrium_vs_k(params, k_grid, {0.05, 0.95});
    Table branches("equilibrium_vs_k", {"k", "h_autonomous", "h_dependent"});
    for (std::size_t i = 0; i < k_grid.size(); ++i)
        branches.add_row({k_grid[i], autonomous[i], dependent[i]});

    std::vector<Table> tables;
    tables.push_back(std::move(comparison));
    tables.push_back(std::move(recovery));
    tables.push_back(std::move(recovery_summary));
    tables.push_back(std::move(branches));
    return tables;
}

// ------------------------------------------------------------ fig4 / fig4b

std::vector<Table> fig4_threshold(const RunConfig& config) {
    sweep::KStarOptions options;
    options.replicates = replicates_or(config, 50);
    const auto report =
        sweep::k_sweep(experiment_baseline(config), options, config.threads);

    Table curve("k_sweep", {"k", "median_h", "iqr_lo", "iqr_hi", "gradient"});
    for (std::size_t i = 0; i < report.k_values.size(); ++i)
        curve.add_row({report.k_values[i], report.statistic_h[i], report.iqr_lo[i],
                       report.iqr_hi[i], report.gradient[i]});
    Table star("k_star", {"k_star", "max_gradient", "endpoint_maximum"});
    star.add_row({report.k_star, report.max_gradient, report.endpoint_maximum});

    std::vector<Table> tables;
    tables.push_back(std::move(curve));
    tables.push_back(std::move(star));
    return tables;
}

std::vector<Table> fig4b_heatmap(const RunConfig& config) {
    const auto result = sweep::k_crisis_heatmap(
        experiment_baseline(config), 50, 35, replicates_or(config, 10),
        config.threads);

    Table grid("k_crisis_heatmap", {"crisis", "k", "median_h"});
    for (std::size_t row = 0; row < result.crisis_values.size(); ++row)
        for (std::size_t col = 0; col < result.k_values.size(); ++col)
            grid.add_row({result.crisis_values[row], result.k_values[col],
                          result.statistic_h[row][col]});
    Table contour("h_half_contour", {"crisis", "k_at_half"});
    for (std::size_t row = 0; row < result.crisis_values.size(); ++row)
        if (result.contour_k[row])
            contour.add_row({result.crisis_values[row], *result.contour_k[row]});

    std::vector<Table> tables;
    tables.push_back(std::move(grid));
    tables.push_back(std::move(contour));
    return tables;
}

// ------------------------------------------------------------ fig5 / fig6

std::vector<Table> fig5_antifragility(const RunConfig& config) {
    const auto rows = sweep::antifragility_curve(
        experiment_baseline(config), {0.7, 0.8, 0.9, 0.95},
        {0.0, 0.05, 0.12, 0.20, 0.25}, replicates_or(config, 50), config.threads);
    Table table("antifragility", {"k", "crisis", "median_h", "iqr_lo", "iqr_hi",
                                  "improvement_ratio"});
    for (const auto& row : rows)
        table.add_row({row.k, row.crisis, row.statistic, row.iqr_lo, row.iqr_hi,
                       row.improvement_ratio});
    return {table};
}

std::vector<Table> fig6_policy(const RunConfig& config) {
    abm::AbmConfig base = experiment_baseline(config);
    base.params.k_ai = 0.9;
    base.p_crisis = 0.05;
    const auto rows = sweep::policy_curve(base, {0.0, 0.1, 0.2, 0.3, 0.4},
                                          replicates_or(config, 50), config.threads);
    Table table("policy", {"practice_fraction", "median_h", "iqr_lo", "iqr_hi"});
    Table improvement("policy_improvement", {"practice_fraction", "improvement_pct"});
    for (const auto& row : rows) {
        table.add_row({row.practice_fraction, row.median_h, row.iqr_lo, row.iqr_hi});
        improvement.add_row({row.practice_fraction, row.improvement_pct});
    }
    std::vector<Table> tables;
    tables.push_back(std::move(table));
    tables.push_back(std::move(improvement));
    return tables;
}

// ------------------------------------------------------------ tab1

std::vector<Table> tab1_kbar(const RunConfig& config) {
    const auto scores = ingest_benchmarks(config.data_dir / "benchmarks.csv");
    std::vector<std::string> models;
    for (const auto& s : scores)
        if (std::find(models.begin(), models.end(), s.model) == models.end())
            models.push_back(s.model);

    Table table("kbar_table", {"model", "release_date", "mmlu", "humaneval", "usmle",
                               "bar", "kbar", "above_threshold"});
    for (const auto& model : models) {
        const auto result = estimation::kbar(model, scores);
        std::string release;
        for (const auto& s : scores)
            if (s.model == model) release = s.release_date;
        table.add_row({model, release,
                       result.domain_k.at(estimation::BenchmarkDomain::mmlu),
                       result.domain_k.at(estimation::BenchmarkDomain::human_eval),
                       result.domain_k.at(estimation::BenchmarkDomain::usmle),
                       result.domain_k.at(estimation::BenchmarkDomain::bar),
                       result.kbar, result.above_threshold});
    }
    return {table};
}

// ------------------------------------------------------------ SI presets

std::vector<Table> si_s1_parameter_space(const RunConfig& config) {
    const auto grid = sweep::gamma_delta_grid(100, 100, config.threads);
    Table cells("gamma_delta_grid", {"gamma", "delta", "equilibrium_h"});
    for (std::size_t j = 0; j < grid.delta_values.size(); ++j)
        for (std::size_t i = 0; i < grid.gamma_values.size(); ++i)
            cells.add_row({grid.gamma_values[i], grid.delta_values[j],
                           grid.equilibrium_h[j][i]});
    Table presets("historical_presets",
                  {"name", "cost", "gamma", "scope", "equilibrium_h"});
    for (const auto& preset : grid.presets)
        presets.add_row({preset.name, preset.cost, preset.gamma, preset.scope,
                         preset.equilibrium_h});

    const auto ic = sweep::initial_condition_grid(21, 20, 0.7, config.threads);
    Table ic_cells("initial_condition_grid", {"h0", "scope", "equilibrium_h"});
    for (std::size_t j = 0; j < ic.scope_values.size(); ++j)
        for (std::size_t i = 0; i < ic.h0_values.size(); ++i)
            ic_cells.add_row({ic.h0_values[i], ic.scope_values[j],
                              ic.equilibrium_h[j][i]});

    std::vector<Table> tables;
    tables.push_back(std::move(cells));
    tables.push_back(std::move(presets));
    tables.push_back(std::move(ic_cells));
    return tables;
}

std::vector<Table> si_s2_epsilon(const RunConfig& config) {
    (void)config;
    const auto sweep_result =
        sweep::epsilon_sweep({0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.25});
    Table curve("epsilon_recovery", {"epsilon", "recovery_time"});
    for (const auto& point : sweep_result.points)
        curve.add_row({point.epsilon, point.recovery_time});
    Table summary("epsilon_summary", {"ratio_low_to_high"});
    summary.add_row({sweep_result.ratio_first_to_last});

    ModelParams params;
    std::vector<double> k_grid;
    for (int i = 0; i <= 60; ++i) k_grid.push_back(1.2 * i / 60.0);
    const auto autonomous = ode::equilibrium_vs_k(params, k_grid, {0.95, 0.02});
    const auto dependent = ode::equilibrium_vs_k(params, k_grid, {0.05, 0.95});
    Table branches("bifurcation_branches", {"k", "h_autonomous", "h_dependent"});
    for (std::size_t i = 0; i < k_grid.size(); ++i)
        branches.add_row({k_grid[i], autonomous[i], dependent[i]});

    std::vector<Table> tables;
    tables.push_back(std::move(curve));
    tables.push_back(std::move(summary));
    tables.push_back(std::move(branches));
    return tables;
}

std::vector<Table> si_s4_twoskill(const RunConfig& config) {
    (void)config;
    using ode::TwoSkillScenario;
    const TwoSkillState initial{0.8, 0.8, 0.1, 0.1, 0.5, 0.5};

    const auto params_for = [](double k) {
        ModelParams p;
        p.scope = 1.0;
        p.k_ai = k;
        return p;
    };

    Table series("twoskill_timeseries",
                 {"scenario", "t", "h1", "d1", "h2", "d2", "aggregate_h"});
    const auto record = [&](TwoSkillScenario scenario, double k1, double k2) {
        const auto traj = ode::simulate_two_skill(params_for(k1), params_for(k2),
                                                  scenario, initial, 600.0, 0.1);
        for (std::size_t i = 0; i < traj.times.size(); i += 20) {
            const auto& st = traj.states[i];
            series.add_row({ode::two_skill_scenario_name(scenario), traj.times[i],
                            st.h1, st.d1, st.h2, st.d2, traj.aggregate_h[i]});
        }
    };
    record(TwoSkillScenario::no_reallocation, 0.95, 0.30);
    record(TwoSkillScenario::full_reallocation, 0.95, 0.30);
    record(TwoSkillScenario::both_skills, 0.95, 0.95);

    Table vs_k("twoskill_vs_k", {"k", "aggregate_a", "aggregate_b", "aggregate_c"});
    for (int i = 0; i <= 20; ++i) {
        const double k = 0.5 + 0.5 * i / 20.0;
        const auto run = [&](TwoSkillScenario scenario, double k2) {
            return ode::simulate_two_skill(params_for(k), params_for(k2), scenario,
                                           initial, 600.0, 0.1)
                .aggregate_h.back();
        };
        vs_k.add_row({k, run(TwoSkillScenario::no_reallocation, 0.30),
                      run(TwoSkillScenario::full_reallocation, 0.30),
                      run(TwoSkillScenario::both_skills, k)});
    }

    std::vector<Table> tables;
    tables.push_back(std::move(series));
    tables.push_back(std::move(vs_k));
    return tables;
}

std::vector<Table> sensitivity_suite_tables(const RunConfig& config) {
    sweep::KStarOptions options;
    options.replicates = replicates_or(config, 10);
    const std::vector<sweep::SensitivityRange> ranges = {
        {"beta", 0.01, 0.10, 5},
        {"alpha", 0.02, 0.10, 5},
        {"delta", 0.0, 2.0, 5},
        {"scope", 0.3, 0.9, 5},
        {"gamma", 0.01, 0.5, 5},
    };
    const auto report = sweep::sensitivity_suite(experiment_baseline(config), ranges,
                                                 options, config.threads);
    Table rows("sensitivity",
               {"parameter", "value", "k_star", "max_gradient", "interior"});
    for (const auto& row : report.rows)
        rows.add_row({row.parameter, row.value, row.k_star, row.max_gradient,
                      row.interior});
    Table summary("sensitivity_summary",
                  {"pooled_k_star_min", "pooled_k_star_max", "all_interior"});
    summary.add_row({report.pooled_k_star_min, report.pooled_k_star_max,
                     report.all_interior});
    std::vector<Table> tables;
    tables.push_back(std::move(rows));
    tables.push_back(std::move(summary));
    return tables;
}

using ExperimentFn = std::function<std::vector<Table>(const RunConfig&)>;

const std::vector<std::pair<std::string, ExperimentFn>>& registry() {
    static const std::vector<std::pair<std::string, ExperimentFn>> experiments = {
        {"fig1-calibration", fig1_calibration},
        {"fig2-pisa-panel", fig2_pisa_panel},
        {"fig3-model-comparison", fig3_model_comparison},
        {"fig4-threshold", fig4_threshold},
        {"fig4b-heatmap", fig4b_heatmap},
        {"fig5-antifragility", fig5_antifragility},
        {"fig6-policy", fig6_policy},
        {"tab1-kbar", tab1_kbar},
        {"si-s1-parameter-space", si_s1_parameter_space},
        {"si-s2-epsilon", si_s2_epsilon},
        {"si-s4-twoskill", si_s4_twoskill},
        {"sensitivity-suite", sensitivity_suite_tables},
    };
    return experiments;
}

} // namespace

estimation::RecoveryScenario recovery_scenario() {
    estimation::RecoveryScenario scenario;
    scenario.driver = [](double t) { return t < 10.0 ? 0.0 : 0.95; };
    scenario.t_removal = 50.0;
    scenario.horizon = 50.0;
    scenario.epsilon = 0.01;
    for (int t = 0; t <= 50; t += 2) scenario.times.push_back(t);
    scenario.values = estimation::capability_series(0.004, 0.08, scenario.epsilon,
                                                    0.55, 0.0, scenario.times,
                                                    scenario.driver, scenario.dt);
    return scenario;
}

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

abm::AbmConfig experiment_baseline(const RunConfig& config) {
    abm::AbmConfig cfg;
    cfg.p_crisis = 0.05;
    cfg.turnover_rate = 0.02;
    cfg.entry_mode = abm::EntryMode::population_mean;
    cfg.init_h_mean = 0.95;
    cfg.init_d_mean = 0.10;
    cfg.seed = config.seed;
    for (const auto& [key, value] : config.abm_overrides)
        apply_abm_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

std::vector<Table> compute_experiment(const RunConfig& config) {
    for (const auto& [name, fn] : registry())
        if (name == config.experiment) return fn(config);
    std::string known;
    for (const auto& [name, fn] : registry()) known += " " + name;
    throw std::invalid_argument("unknown experiment '" + config.experiment +
                                "'; valid presets:" + known);
}

ResultManifest run_experiment(const RunConfig& config) {
    namespace fs = std::filesystem;
    // The output directory must be writable before any computation starts.
    fs::create_directories(config.output_dir);
    {
        const auto probe = config.output_dir / ".write_probe";
        std::ofstream test(probe);
        if (!test) throw std::runtime_error("output_dir not writable: " +
                                            config.output_dir.string());
        test.close();
        fs::remove(probe);
    }

    const auto start = std::chrono::steady_clock::now();
    const auto tables = compute_experiment(config);

    ResultManifest manifest;
    manifest.experiment = config.experiment;
    manifest.seed = config.seed;
    manifest.threads = config.threads;

    std::vector<fs::path> written;
    try {
        for (const auto& table : tables) {
            const auto path = write_table(table, config.output_dir, config.format);
            written.push_back(path);
            manifest.files.push_back({path.filename().string(), table.rows.size()});
        }
    } catch (...) {
        for (const auto& path : written) fs::remove(path);
        throw;
    }
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    std::ofstream out(config.output_dir / "manifest.json", std::ios::binary);
    out << "{\n";
    out << "  \"experiment\": \"" << manifest.experiment << "\",\n";
    out << "  \"toolkit_version\": \"" << manifest.toolkit_version << "\",\n";
    out << "  \"seed\": " << manifest.seed << ",\n";
    out << "  \"threads\": " << manifest.threads << ",\n";
    out << "  \"wall_time_seconds\": " << manifest.wall_time_seconds << ",\n";
    out << "  \"files\": [";
    for (std::size_t i = 0; i < manifest.files.size(); ++i)
        out << (i ? ", " : "") << "{\"name\": \"" << manifest.files[i].name
            << "\", \"rows\": " << manifest.files[i].rows << "}";
    out << "]\n}\n";
    if (!out) throw std::runtime_error("cannot write manifest.json");
    return manifest;
}

} // namespace capdyn::io
