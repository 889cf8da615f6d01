// capdyn command-line interface: simulation, sweeps, fitting, model
// comparison, calibration, benchmark scoring and figure reproduction.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capdyn/abm.hpp"
#include "capdyn/estimation.hpp"
#include "capdyn/experiments.hpp"
#include "capdyn/io.hpp"
#include "capdyn/ode.hpp"
#include "capdyn/run_config.hpp"
#include "capdyn/sweep.hpp"
#include "capdyn/two_skill.hpp"

namespace {

using namespace capdyn;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets; ///< key=value overrides
    std::string seed;
    std::string threads;
    std::string out;
    std::string format;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "configuration file (key = value lines)");
        app->add_option("--set", sets, "override any config key, e.g. --set params.beta=0.05")
            ->take_all();
        app->add_option("--seed", seed, "base RNG seed");
        app->add_option("--threads", threads, "worker threads (0 = auto)");
        app->add_option("--out", out, "output directory");
        app->add_option("--format", format, "output format: csv or json");
    }

    io::RunConfig resolve() const {
        std::vector<std::pair<std::string, std::string>> flags;
        for (const auto& kv : sets) {
            const auto equals = kv.find('=');
            if (equals == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            flags.emplace_back(kv.substr(0, equals), kv.substr(equals + 1));
        }
        if (!seed.empty()) flags.emplace_back("seed", seed);
        if (!threads.empty()) flags.emplace_back("threads", threads);
        if (!out.empty()) flags.emplace_back("out", out);
        if (!format.empty()) flags.emplace_back("format", format);
        std::optional<std::filesystem::path> file;
        if (!config_path.empty()) file = config_path;
        return io::parse_config(file, flags);
    }
};

void emit(const io::RunConfig& config, const std::vector<io::Table>& tables) {
    for (const auto& table : tables) {
        const auto path = io::write_table(table, config.output_dir, config.format);
        std::printf("wrote %s (%zu rows)\n", path.c_str(), table.rows.size());
    }
}

int cmd_simulate(const io::RunConfig& config) {
    abm::AbmConfig cfg = config.abm;
    cfg.seed = config.seed;
    const abm::RunSummary summary = abm::run(cfg);
    io::Table table("simulation", {"t", "mean_h", "mean_d"});
    for (std::size_t t = 0; t < summary.mean_h.size(); ++t)
        table.add_row({static_cast<double>(t) * cfg.dt, summary.mean_h[t],
                       summary.mean_d[t]});
    io::Table stats("simulation_summary",
                    {"equilibrium_h", "crisis_count", "min_h_during_crisis"});
    stats.add_row({summary.equilibrium_h,
                   static_cast<double>(summary.crisis_steps.size()),
                   summary.min_h_during_crisis ? io::Cell(*summary.min_h_during_crisis)
                                               : io::Cell("none")});
    emit(config, {table, stats});
    std::printf("equilibrium_h = %.6f\n", summary.equilibrium_h);
    return 0;
}

int cmd_sweep(const io::RunConfig& config, const std::vector<std::string>& axes,
              int replicates, const std::string& statistic) {
    sweep::SweepSpec spec;
    spec.base_config = config.abm;
    spec.base_config.seed = config.seed;
    spec.replicates = replicates;
    spec.statistic =
        statistic == "mean" ? sweep::Statistic::mean : sweep::Statistic::median;
    for (const auto& axis : axes) {
        sweep::SweepAxis parsed;
        std::string rest = axis;
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while ((pos = rest.find(':')) != std::string::npos) {
            parts.push_back(rest.substr(0, pos));
            rest = rest.substr(pos + 1);
        }
        parts.push_back(rest);
        if (parts.size() != 4)
            throw std::invalid_argument("--axis expects key:lo:hi:count, got '" +
                                        axis + "'");
        parsed.name = parts[0];
        parsed.lo = std::stod(parts[1]);
        parsed.hi = std::stod(parts[2]);
        parsed.count = std::stoi(parts[3]);
        spec.axes.push_back(parsed);
    }
    const auto result = sweep::run_sweep(spec, config.threads);
    std::vector<std::string> columns;
    for (const auto& axis : spec.axes) columns.push_back(axis.name);
    columns.insert(columns.end(), {"statistic_h", "mean_h", "iqr_lo", "iqr_hi"});
    io::Table table("sweep", columns);
    for (const auto& cell : result.cells) {
        std::vector<io::Cell> row;
        for (double v : cell.axis_values) row.emplace_back(v);
        row.insert(row.end(), {io::Cell(cell.statistic), io::Cell(cell.mean),
                               io::Cell(cell.iqr_lo), io::Cell(cell.iqr_hi)});
        table.add_row(std::move(row));
    }
    emit(config, {table});
    std::printf("%ld runs executed\n", result.runs_executed);
    return 0;
}

int cmd_fit(const io::RunConfig& config, const std::string& kind, bool profile) {
    const auto pisa = config.data_dir / "pisa.csv";
    const auto adoption = config.data_dir / "adoption.csv";
    std::vector<io::Table> tables;
    if (kind == "single") {
        const auto series = io::load_oecd_series(pisa);
        const auto fit =
            estimation::fit_ode_single(series, estimation::oecd_default_driver());
        io::Table table("fit_single", {"alpha", "beta_eff", "h_max", "r_squared",
                                       "rmse", "aic", "bic"});
        table.add_row({fit.param("alpha"), fit.param("beta_eff"), fit.param("h_max"),
                       fit.r_squared, fit.rmse, fit.aic, fit.bic});
        tables.push_back(std::move(table));
        if (profile) {
            const auto prof = estimation::profile_likelihood_alpha(
                series, estimation::oecd_default_driver());
            io::Table curve("profile_single", {"alpha", "log_likelihood"});
            for (std::size_t i = 0; i < prof.alpha.size(); ++i)
                curve.add_row({prof.alpha[i], prof.log_likelihood[i]});
            tables.push_back(std::move(curve));
            std::printf("profile CI [%g, %g] (%.2f decades)\n", prof.ci_lo, prof.ci_hi,
                        prof.ci_decades());
        }
    } else if (kind == "panel") {
        const auto panel = io::load_panel(pisa, adoption);
        const auto fit = estimation::fit_ode_panel(panel);
        io::Table table("fit_panel", {"alpha", "beta", "h_max", "r_squared", "rmse",
                                      "aic", "bic", "boundary_pinned"});
        table.add_row({fit.param("alpha"), fit.param("beta"), fit.param("h_max"),
                       fit.r_squared, fit.rmse, fit.aic, fit.bic,
                       fit.boundary_pinned});
        tables.push_back(std::move(table));
        if (profile) {
            const auto prof = estimation::profile_likelihood_alpha(panel);
            io::Table curve("profile_panel", {"alpha", "log_likelihood"});
            for (std::size_t i = 0; i < prof.alpha.size(); ++i)
                curve.add_row({prof.alpha[i], prof.log_likelihood[i]});
            tables.push_back(std::move(curve));
            std::printf("profile CI [%g, %g] (%.2f decades)\n", prof.ci_lo, prof.ci_hi,
                        prof.ci_decades());
        }
    } else {
        throw std::invalid_argument("fit kind must be single or panel");
    }
    emit(config, tables);
    return 0;
}

int cmd_compare(const io::RunConfig& config) {
    io::RunConfig preset = config;
    preset.experiment = "fig3-model-comparison";
    emit(config, io::compute_experiment(preset));

    const auto panel =
        io::load_panel(config.data_dir / "pisa.csv", config.data_dir / "adoption.csv");
    std::vector<estimation::FitResult> fits;
    fits.push_back(estimation::fit_ode_panel(panel));
    fits.push_back(
        estimation::fit_alt_model_panel(estimation::ModelKind::country_linear, panel));
    fits.push_back(
        estimation::fit_alt_model_panel(estimation::ModelKind::exponential, panel));
    io::Table table("panel_comparison", {"model", "n_params", "r_squared", "rmse",
                                         "aic", "bic", "delta_aic", "delta_bic"});
    for (const auto& row : estimation::compare_models(fits))
        table.add_row({estimation::model_kind_name(row.kind), row.n_params,
                       row.r_squared, row.rmse, row.aic, row.bic, row.delta_aic,
                       row.delta_bic});
    emit(config, {table});
    return 0;
}

int cmd_calibrate(const io::RunConfig& config) {
    io::RunConfig preset = config;
    preset.experiment = "fig1-calibration";
    emit(config, io::compute_experiment(preset));
    return 0;
}

int cmd_benchmark(const io::RunConfig& config) {
    io::RunConfig preset = config;
    preset.experiment = "tab1-kbar";
    emit(config, io::compute_experiment(preset));
    return 0;
}

int cmd_two_skill(const io::RunConfig& config) {
    io::RunConfig preset = config;
    preset.experiment = "si-s4-twoskill";
    emit(config, io::compute_experiment(preset));
    return 0;
}

int cmd_reproduce(const io::RunConfig& config) {
    const auto manifest = io::run_experiment(config);
    std::printf("experiment %s: %zu files in %s (%.2f s, seed %llu)\n",
                manifest.experiment.c_str(), manifest.files.size(),
                config.output_dir.c_str(), manifest.wall_time_seconds,
                static_cast<unsigned long long>(manifest.seed));
    for (const auto& file : manifest.files)
        std::printf("  %s (%zu rows)\n", file.name.c_str(), file.rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"capdyn: capability-delegation dynamics toolkit"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* simulate = app.add_subcommand("simulate", "single stochastic simulation run");
    common.attach(simulate);

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo parameter sweep");
    std::vector<std::string> axes;
    int sweep_replicates = 50;
    std::string sweep_statistic = "median";
    sweep_cmd->add_option("--axis", axes, "axis as key:lo:hi:count (1 or 2)")
        ->required()
        ->take_all();
    sweep_cmd->add_option("--replicates", sweep_replicates, "replicates per grid point");
    sweep_cmd->add_option("--statistic", sweep_statistic, "median or mean");
    common.attach(sweep_cmd);

    auto* fit = app.add_subcommand("fit", "fit the capability model to score data");
    std::string fit_kind = "panel";
    bool fit_profile = false;
    fit->add_option("--kind", fit_kind, "single or panel");
    fit->add_flag("--profile", fit_profile, "also compute the profile likelihood");
    common.attach(fit);

    auto* compare = app.add_subcommand("compare", "model comparison tables");
    common.attach(compare);

    auto* calibrate = app.add_subcommand("calibrate", "decay rates from deskilling data");
    common.attach(calibrate);

    auto* benchmark = app.add_subcommand("benchmark", "benchmark capability ratios");
    common.attach(benchmark);

    auto* two_skill = app.add_subcommand("two-skill", "two-skill scenario comparison");
    common.attach(two_skill);

    auto* reproduce = app.add_subcommand("reproduce", "run a registered preset");
    std::string preset;
    reproduce->add_option("preset", preset, "preset name (see --list)")->required();
    common.attach(reproduce);

    auto* list = app.add_subcommand("list", "list registered presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : capdyn::io::experiment_names())
                std::printf("%s\n", name.c_str());
            return 0;
        }
        capdyn::io::RunConfig config = common.resolve();
        if (simulate->parsed()) return cmd_simulate(config);
        if (sweep_cmd->parsed())
            return cmd_sweep(config, axes, sweep_replicates, sweep_statistic);
        if (fit->parsed()) return cmd_fit(config, fit_kind, fit_profile);
        if (compare->parsed()) return cmd_compare(config);
        if (calibrate->parsed()) return cmd_calibrate(config);
        if (benchmark->parsed()) return cmd_benchmark(config);
        if (two_skill->parsed()) return cmd_two_skill(config);
        if (reproduce->parsed()) {
            config.experiment = preset;
            return cmd_reproduce(config);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
